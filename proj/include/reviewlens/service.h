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

// Comparison jobs and the HTTP front end.
//
// A job walks searching -> preprocessing -> modeling -> done (or failed).
// Preprocessing follows the partial-hit strategy: cached reviews are used as
// they are, the job preprocesses the misses it claimed and waits for misses
// another job claimed. Each product's ensemble starts as soon as its corpus
// is complete. Every time either side's best model changes the job publishes
// a new ComparisonSummary with the next version number.

#ifndef REVIEWLENS_SERVICE_H_
#define REVIEWLENS_SERVICE_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "reviewlens/engine.h"
#include "reviewlens/ensemble.h"
#include "reviewlens/store.h"
#include "reviewlens/summarize.h"

namespace reviewlens {

struct ServiceConfig {
  std::string store_path;
  ModelConfig model;
  size_t ensemble_size = 4;
  std::vector<std::string> stopword_files;
  size_t background_workers = 1;
  std::string static_dir;  // served at / when set
};

struct CompareRequest {
  std::string reference;
  std::string other;
  std::optional<int32_t> k;
  std::optional<uint64_t> seed;
};

enum class JobPhase { kSearching, kPreprocessing, kModeling, kDone, kFailed };

const char* phase_name(JobPhase phase);

struct ProductProgress {
  std::string product_id;
  size_t processed = 0;
  size_t total = 0;
};

struct JobStatusView {
  std::string job_id;
  JobPhase phase = JobPhase::kSearching;
  std::vector<JobPhase> history;  // every phase entered, in order
  ProductProgress reference;
  ProductProgress other;
  uint64_t version = 0;
  std::string error;
};

class ComparisonJob {
 public:
  ComparisonJob(std::string id, CompareRequest request, ModelConfig model);

  const std::string& id() const { return id_; }
  const CompareRequest& request() const { return request_; }
  const ModelConfig& model() const { return model_; }

  JobStatusView status() const;
  bool finished() const;

  // Latest summary, or null before the first one.
  std::shared_ptr<const ComparisonSummary> latest() const;
  // Waits until a summary with version > after exists or the job finishes
  // or the timeout elapses; returns latest() when it is newer, else null.
  std::shared_ptr<const ComparisonSummary> wait_newer(uint64_t after,
                                                      std::chrono::milliseconds timeout) const;
  // Blocks until done or failed.
  void wait() const;

  void cancel() { stop_.request_stop(); }
  std::stop_token stop_token() const { return stop_.get_token(); }

  // Used by the dispatcher's job thread.
  void enter(JobPhase phase, std::string error = {});
  void set_progress(bool reference, size_t processed, size_t total);
  void publish(ComparisonSummary summary);

 private:
  std::string id_;
  CompareRequest request_;
  ModelConfig model_;
  std::stop_source stop_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  JobStatusView status_;
  std::shared_ptr<const ComparisonSummary> latest_;
};

class Dispatcher {
 public:
  Dispatcher(Store& store, ServiceConfig config);
  ~Dispatcher();

  Dispatcher(const Dispatcher&) = delete;
  Dispatcher& operator=(const Dispatcher&) = delete;

  // Validates and starts a job, or returns the id of a live job with the
  // same (reference, other, k, seed). Throws BadRequest for identical ids
  // and NotFoundError for unknown products.
  std::string submit(const CompareRequest& request);
  std::shared_ptr<ComparisonJob> job(const std::string& job_id) const;  // NotFoundError

  // Queues every unprocessed review as background work and starts the
  // configured number of workers.
  void start_background_workers();

  Store& store() { return store_; }
  const ServiceConfig& config() const { return config_; }

  // Reviews preprocessed by this dispatcher, for instrumentation.
  size_t preprocessed_count() const { return preprocessed_.load(); }

  // Loads the configured stop-word files. Read per job so edits apply to
  // the next query without a restart.
  StopWordList load_stop_words() const;

 private:
  void run_job(std::shared_ptr<ComparisonJob> job, std::stop_token stop);
  ProductCorpus prepare_product(ComparisonJob& job, bool reference, const std::string& product_id,
                                std::stop_token stop);
  void background_loop(std::stop_token stop);

  Store& store_;
  ServiceConfig config_;
  std::atomic<size_t> preprocessed_{0};

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<ComparisonJob>> jobs_;
  std::map<std::string, std::string> live_keys_;
  uint64_t next_job_ = 1;
  std::vector<std::jthread> job_threads_;
  std::vector<std::jthread> background_;
};

// Runs a comparison to completion without HTTP. Returns the final summary;
// first_summary receives the wall time until the first summary appeared.
ComparisonSummary compare_headless(Dispatcher& dispatcher, const CompareRequest& request,
                                   std::chrono::duration<double>* first_summary = nullptr);

class HttpServer {
 public:
  explicit HttpServer(Dispatcher& dispatcher);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and serves on a background thread. port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks the calling thread serving requests.
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reviewlens

#endif  // REVIEWLENS_SERVICE_H_
