// Copyright 2026 The ReviewLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Several independently seeded samplers per product, raced in parallel. Each
// instance pushes its emissions into an update pool; the pool's best entry by
// log-likelihood is what clients see.
//
// Note that instances optimize their own alpha and beta, so their
// log-likelihoods are evaluated under different hyperparameters. Selection
// compares the raw values anyway.

#ifndef REVIEWLENS_ENSEMBLE_H_
#define REVIEWLENS_ENSEMBLE_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "reviewlens/engine.h"

namespace reviewlens {

struct Emission {
  std::shared_ptr<const ModelSnapshot> snapshot;

  int32_t iteration() const { return snapshot->iteration; }
  double log_likelihood() const { return snapshot->log_likelihood; }
};

// Latest emission per instance. Offers with a stamp not above the stored one
// are ignored.
class UpdatePool {
 public:
  explicit UpdatePool(size_t instances) : latest_(instances) {}

  // Returns true when the emission replaced the stored one.
  bool offer(size_t instance, Emission emission);
  std::vector<std::optional<Emission>> view() const;
  size_t size() const { return latest_.size(); }

 private:
  mutable std::mutex mu_;
  std::vector<std::optional<Emission>> latest_;
};

struct Selection {
  size_t instance = 0;
  std::shared_ptr<const ModelSnapshot> snapshot;
};

// Maximum log-likelihood over present entries, ties to the lowest instance.
// Throws NotReadyError when nothing has been emitted.
Selection select_best(std::span<const std::optional<Emission>> pool);

// What a client last saw from a job.
struct PollStamp {
  size_t instance = 0;
  int32_t iteration = -1;
  bool done = false;

  bool operator==(const PollStamp&) const = default;
};

struct PollResult {
  Selection best;
  PollStamp stamp;
};

enum class JobStatus { kRunning, kDone, kFailed };

// Derives m pairwise distinct instance seeds from a job seed.
std::vector<uint64_t> derive_seeds(uint64_t job_seed, size_t m);

class EnsembleJob {
 public:
  // Launches m sampler threads. An empty corpus yields a job that is
  // already failed.
  static std::shared_ptr<EnsembleJob> start(std::string job_id, TokenCorpus corpus,
                                            ModelConfig config, size_t m);
  ~EnsembleJob();

  EnsembleJob(const EnsembleJob&) = delete;
  EnsembleJob& operator=(const EnsembleJob&) = delete;

  const std::string& id() const { return id_; }
  const std::vector<uint64_t>& seeds() const { return seeds_; }
  JobStatus status() const;
  std::string error() const;

  // Current best when it differs from `since`; nullopt otherwise.
  std::optional<PollResult> poll(const std::optional<PollStamp>& since) const;

  Selection best() const { return select_best(pool_.view()); }
  const UpdatePool& pool() const { return pool_; }

  // Blocks until the pool changes after `since` or the job finishes or the
  // timeout elapses. Returns the pool's change counter.
  uint64_t wait_for_update(uint64_t since, std::chrono::milliseconds timeout) const;
  uint64_t update_count() const;

  void wait() const;
  void cancel();

 private:
  EnsembleJob(std::string id, size_t m);
  void on_emission(size_t instance, std::shared_ptr<const ModelSnapshot> snap);
  void on_finished(size_t instance, std::optional<std::string> error);

  std::string id_;
  std::vector<uint64_t> seeds_;
  UpdatePool pool_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  uint64_t updates_ = 0;
  size_t running_ = 0;
  size_t failed_ = 0;
  bool empty_corpus_ = false;
  std::string error_;

  std::vector<std::jthread> workers_;
};

}  // namespace reviewlens

#endif  // REVIEWLENS_ENSEMBLE_H_
