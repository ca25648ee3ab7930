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

#include "reviewlens/ensemble.h"

#include <unordered_set>

#include "reviewlens/errors.h"

namespace reviewlens {

bool UpdatePool::offer(size_t instance, Emission emission) {
  std::lock_guard lock(mu_);
  auto& slot = latest_.at(instance);
  if (slot && slot->iteration() >= emission.iteration()) return false;
  slot = std::move(emission);
  return true;
}

std::vector<std::optional<Emission>> UpdatePool::view() const {
  std::lock_guard lock(mu_);
  return latest_;
}

Selection select_best(std::span<const std::optional<Emission>> pool) {
  std::optional<Selection> best;
  for (size_t i = 0; i < pool.size(); ++i) {
    if (!pool[i]) continue;
    if (!best || pool[i]->log_likelihood() > best->snapshot->log_likelihood) {
      best = Selection{i, pool[i]->snapshot};
    }
  }
  if (!best) throw NotReadyError("select_best: update pool is empty");
  return *best;
}

std::vector<uint64_t> derive_seeds(uint64_t job_seed, size_t m) {
  // splitmix64 is a bijection of its counter, so distinct counters give
  // distinct seeds.
  std::vector<uint64_t> seeds;
  seeds.reserve(m);
  uint64_t state = job_seed;
  for (size_t i = 0; i < m; ++i) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    seeds.push_back(z ^ (z >> 31));
  }
  return seeds;
}

EnsembleJob::EnsembleJob(std::string id, size_t m) : id_(std::move(id)), pool_(m) {}

EnsembleJob::~EnsembleJob() {
  cancel();
  workers_.clear();
}

std::shared_ptr<EnsembleJob> EnsembleJob::start(std::string job_id, TokenCorpus corpus,
                                                ModelConfig config, size_t m) {
  if (m < 1) throw ContractError("EnsembleJob: need at least one instance");
  config.validate();
  std::shared_ptr<EnsembleJob> job(new EnsembleJob(std::move(job_id), m));
  job->seeds_ = derive_seeds(config.seed, m);

  if (corpus.token_count() == 0) {
    job->empty_corpus_ = true;
    job->error_ = "empty corpus";
    return job;
  }

  auto shared_corpus = std::make_shared<const TokenCorpus>(std::move(corpus));
  job->running_ = m;
  job->workers_.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    ModelConfig instance_config = config;
    instance_config.seed = job->seeds_[i];
    // Raw pointer: the destructor joins every worker before members die.
    EnsembleJob* self = job.get();
    job->workers_.emplace_back([self, i, shared_corpus, instance_config](std::stop_token stop) {
      try {
        run(*shared_corpus, instance_config,
            [self, i](std::shared_ptr<const ModelSnapshot> snap) {
              self->on_emission(i, std::move(snap));
            },
            stop);
        self->on_finished(i, std::nullopt);
      } catch (const std::exception& e) {
        self->on_finished(i, std::string(e.what()));
      }
    });
  }
  return job;
}

void EnsembleJob::on_emission(size_t instance, std::shared_ptr<const ModelSnapshot> snap) {
  if (!pool_.offer(instance, Emission{std::move(snap)})) return;
  {
    std::lock_guard lock(mu_);
    ++updates_;
  }
  cv_.notify_all();
}

void EnsembleJob::on_finished(size_t instance, std::optional<std::string> error) {
  (void)instance;
  {
    std::lock_guard lock(mu_);
    --running_;
    if (error) {
      ++failed_;
      error_ = *error;
    }
    ++updates_;
  }
  cv_.notify_all();
}

JobStatus EnsembleJob::status() const {
  std::lock_guard lock(mu_);
  if (empty_corpus_) return JobStatus::kFailed;
  if (running_ > 0) return JobStatus::kRunning;
  return failed_ == pool_.size() ? JobStatus::kFailed : JobStatus::kDone;
}

std::string EnsembleJob::error() const {
  std::lock_guard lock(mu_);
  return error_;
}

std::optional<PollResult> EnsembleJob::poll(const std::optional<PollStamp>& since) const {
  // Status first: once it reads done, every final emission is already pooled.
  const bool done = status() != JobStatus::kRunning;
  const auto view = pool_.view();
  Selection best;
  try {
    best = select_best(view);
  } catch (const NotReadyError&) {
    return std::nullopt;
  }
  PollStamp stamp{best.instance, best.snapshot->iteration, done};
  if (since && *since == stamp) return std::nullopt;
  return PollResult{std::move(best), stamp};
}

uint64_t EnsembleJob::update_count() const {
  std::lock_guard lock(mu_);
  return updates_;
}

uint64_t EnsembleJob::wait_for_update(uint64_t since,
                                      std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return updates_ != since || running_ == 0; });
  return updates_;
}

void EnsembleJob::wait() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return running_ == 0; });
}

void EnsembleJob::cancel() {
  for (auto& w : workers_) w.request_stop();
}

}  // namespace reviewlens
