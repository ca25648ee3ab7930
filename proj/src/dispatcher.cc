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

#include <algorithm>

#include "reviewlens/errors.h"
#include "reviewlens/kernels.h"
#include "reviewlens/service.h"

namespace reviewlens {

namespace {

class Cancelled : public Error {
 public:
  Cancelled() : Error("cancelled") {}
};

struct PreparedSide {
  std::string product_id;
  std::string title;
  ProductCorpus corpus;
  std::vector<ReviewMeta> metas;
};

SideStamp stamp_of(const Selection& s) {
  return SideStamp{s.instance, s.snapshot->iteration, s.snapshot->log_likelihood};
}

}  // namespace

const char* phase_name(JobPhase phase) {
  switch (phase) {
    case JobPhase::kSearching:
      return "searching";
    case JobPhase::kPreprocessing:
      return "preprocessing";
    case JobPhase::kModeling:
      return "modeling";
    case JobPhase::kDone:
      return "done";
    case JobPhase::kFailed:
      return "failed";
  }
  return "unknown";
}

ComparisonJob::ComparisonJob(std::string id, CompareRequest request, ModelConfig model)
    : id_(std::move(id)), request_(std::move(request)), model_(model) {
  status_.job_id = id_;
  status_.history.push_back(JobPhase::kSearching);
  status_.reference.product_id = request_.reference;
  status_.other.product_id = request_.other;
}

JobStatusView ComparisonJob::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

bool ComparisonJob::finished() const {
  std::lock_guard lock(mu_);
  return status_.phase == JobPhase::kDone || status_.phase == JobPhase::kFailed;
}

void ComparisonJob::enter(JobPhase phase, std::string error) {
  {
    std::lock_guard lock(mu_);
    const JobPhase current = status_.phase;
    // Phases only move forward; failed and done are terminal.
    if (current == JobPhase::kDone || current == JobPhase::kFailed) return;
    if (phase != JobPhase::kFailed && static_cast<int>(phase) <= static_cast<int>(current)) {
      return;
    }
    status_.phase = phase;
    status_.history.push_back(phase);
    if (!error.empty()) status_.error = std::move(error);
  }
  cv_.notify_all();
}

void ComparisonJob::set_progress(bool reference, size_t processed, size_t total) {
  std::lock_guard lock(mu_);
  auto& p = reference ? status_.reference : status_.other;
  p.processed = processed;
  p.total = total;
}

void ComparisonJob::publish(ComparisonSummary summary) {
  {
    std::lock_guard lock(mu_);
    summary.job_id = id_;
    summary.version = ++status_.version;
    latest_ = std::make_shared<const ComparisonSummary>(std::move(summary));
  }
  cv_.notify_all();
}

std::shared_ptr<const ComparisonSummary> ComparisonJob::latest() const {
  std::lock_guard lock(mu_);
  return latest_;
}

std::shared_ptr<const ComparisonSummary> ComparisonJob::wait_newer(
    uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] {
    return (latest_ && latest_->version > after) || status_.phase == JobPhase::kDone ||
           status_.phase == JobPhase::kFailed;
  });
  if (latest_ && latest_->version > after) return latest_;
  return nullptr;
}

void ComparisonJob::wait() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] {
    return status_.phase == JobPhase::kDone || status_.phase == JobPhase::kFailed;
  });
}

Dispatcher::Dispatcher(Store& store, ServiceConfig config)
    : store_(store), config_(std::move(config)) {
  config_.model.validate();
  if (config_.ensemble_size < 1) throw ContractError("ensemble_size must be >= 1");
}

Dispatcher::~Dispatcher() {
  std::vector<std::shared_ptr<ComparisonJob>> jobs;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, job] : jobs_) jobs.push_back(job);
  }
  for (auto& job : jobs) job->cancel();
  background_.clear();
  job_threads_.clear();
}

StopWordList Dispatcher::load_stop_words() const {
  StopWordList stops;
  for (const auto& path : config_.stopword_files) stops.add_file(path);
  return stops;
}

std::string Dispatcher::submit(const CompareRequest& request) {
  if (request.reference == request.other) {
    throw BadRequest("reference and other product must differ");
  }
  for (const auto* id : {&request.reference, &request.other}) {
    if (!store_.has_product(*id)) throw NotFoundError("unknown product " + *id);
  }
  ModelConfig model = config_.model;
  if (request.k) model.k = *request.k;
  if (request.seed) model.seed = *request.seed;
  try {
    model.validate();
  } catch (const ContractError& e) {
    throw BadRequest(e.what());
  }

  const std::string key = request.reference + '\x1f' + request.other + '\x1f' +
                          std::to_string(model.k) + '\x1f' + std::to_string(model.seed);
  std::lock_guard lock(mu_);
  if (auto it = live_keys_.find(key); it != live_keys_.end()) {
    auto job = jobs_.at(it->second);
    if (!job->finished()) return job->id();
  }
  CompareRequest effective = request;
  effective.k = model.k;
  effective.seed = model.seed;
  auto job = std::make_shared<ComparisonJob>("job-" + std::to_string(next_job_++),
                                             std::move(effective), model);
  jobs_[job->id()] = job;
  live_keys_[key] = job->id();
  job_threads_.emplace_back([this, job](std::stop_token stop) {
    std::stop_callback forward(stop, [job] { job->cancel(); });
    run_job(job, job->stop_token());
  });
  return job->id();
}

std::shared_ptr<ComparisonJob> Dispatcher::job(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw NotFoundError("unknown job " + job_id);
  return it->second;
}

ProductCorpus Dispatcher::prepare_product(ComparisonJob& job, bool reference,
                                          const std::string& product_id, std::stop_token stop) {
  const ProductRecord record = store_.product(product_id);
  const auto names = product_name_words(record.title);
  const uint64_t version = preprocessing_version(names);
  const size_t total = record.review_ids.size();
  const StopWordList stops = load_stop_words();

  for (;;) {
    if (stop.stop_requested()) throw Cancelled();
    LookupResult found = store_.lookup(product_id, version);
    job.set_progress(reference, found.hits.size(), total);

    if (found.misses.empty()) {
      std::vector<ReviewMeta> metas;
      std::vector<std::vector<std::string>> tokens;
      metas.reserve(found.hits.size());
      tokens.reserve(found.hits.size());
      for (auto& hit : found.hits) {
        metas.push_back(std::move(hit.meta));
        tokens.push_back(std::move(hit.processed.tokens));
      }
      return assemble_corpus(metas, tokens, stops);
    }

    job.enter(JobPhase::kPreprocessing);
    std::vector<RawReview> claimed;
    std::vector<ReviewId> pending;
    for (size_t i = 0; i < found.misses.size(); ++i) {
      if (found.claimed[i]) {
        claimed.push_back(std::move(found.misses[i]));
      } else {
        pending.push_back(review_id_of(found.misses[i]));
      }
    }
    if (!claimed.empty()) {
      try {
        const auto processed = kernels::parallel::preprocess_batch(claimed, names);
        store_.commit_batch(processed);
        preprocessed_ += processed.size();
      } catch (...) {
        for (const auto& r : claimed) store_.release(review_id_of(r));
        throw;
      }
      job.set_progress(reference, found.hits.size() + claimed.size(), total);
    }
    if (!pending.empty()) store_.wait_done(pending, std::chrono::milliseconds(200));
  }
}

void Dispatcher::run_job(std::shared_ptr<ComparisonJob> job, std::stop_token stop) {
  const CompareRequest& req = job->request();
  const size_t m = config_.ensemble_size;
  try {
    auto make_side = [&](bool reference, const std::string& pid) {
      PreparedSide side;
      side.product_id = pid;
      side.title = store_.product(pid).title;
      side.corpus = prepare_product(*job, reference, pid, stop);
      for (const auto& r : side.corpus.reviews) side.metas.push_back(r.meta);
      return side;
    };

    PreparedSide ref = make_side(true, req.reference);
    auto ref_job = EnsembleJob::start(job->id() + "/reference",
                                      token_corpus_of(ref.corpus), job->model(), m);
    PreparedSide other = make_side(false, req.other);
    ModelConfig other_model = job->model();
    // Distinct instance seeds across the two products.
    other_model.seed = job->model().seed ^ 0x5bd1e9955bd1e995ULL;
    auto other_job = EnsembleJob::start(job->id() + "/other",
                                        token_corpus_of(other.corpus), other_model, m);
    job->enter(JobPhase::kModeling);

    std::optional<PollStamp> seen_ref, seen_other;
    std::optional<Selection> best_ref, best_other;
    uint64_t ref_updates = 0, other_updates = 0;
    for (;;) {
      if (stop.stop_requested()) throw Cancelled();
      for (const auto& [ens, name] : {std::pair{ref_job.get(), &req.reference},
                                      std::pair{other_job.get(), &req.other}}) {
        if (ens->status() == JobStatus::kFailed) {
          throw Error("modeling failed for " + *name + ": " + ens->error());
        }
      }
      const auto ref_poll = ref_job->poll(seen_ref);
      const auto other_poll = other_job->poll(seen_other);
      if (ref_poll) {
        seen_ref = ref_poll->stamp;
        best_ref = ref_poll->best;
      }
      if (other_poll) {
        seen_other = other_poll->stamp;
        best_other = other_poll->best;
      }
      if ((ref_poll || other_poll) && best_ref && best_other) {
        SideInput a{ref.product_id, ref.title, best_ref->snapshot.get(),
                    &ref.corpus.vocabulary, ref.metas};
        SideInput b{other.product_id, other.title, best_other->snapshot.get(),
                    &other.corpus.vocabulary, other.metas};
        ComparisonSummary summary = build_comparison(a, b, /*parallel=*/true);
        summary.reference_stamp = stamp_of(*best_ref);
        summary.other_stamp = stamp_of(*best_other);
        summary.done = seen_ref->done && seen_other->done;
        job->publish(std::move(summary));
        if (seen_ref->done && seen_other->done) {
          job->enter(JobPhase::kDone);
          return;
        }
      }
      ref_updates = ref_job->wait_for_update(ref_updates, std::chrono::milliseconds(10));
      other_updates = other_job->wait_for_update(other_updates, std::chrono::milliseconds(10));
    }
  } catch (const std::exception& e) {
    job->enter(JobPhase::kFailed, e.what());
  }
}

void Dispatcher::start_background_workers() {
  const auto todo = store_.unprocessed();
  store_.schedule(todo, Priority::kBackground);
  std::lock_guard lock(mu_);
  for (size_t i = 0; i < config_.background_workers; ++i) {
    background_.emplace_back([this](std::stop_token stop) { background_loop(stop); });
  }
}

void Dispatcher::background_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    auto ticket = store_.wait_ticket(stop, std::chrono::milliseconds(200));
    if (!ticket) continue;
    try {
      const RawReview raw = store_.fetch_review(ticket->review_id);
      const auto names = product_name_words(store_.product(raw.product_id).title);
      store_.commit(preprocess(raw, names));
      ++preprocessed_;
    } catch (const std::exception&) {
      store_.release(ticket->review_id);
    }
  }
}

ComparisonSummary compare_headless(Dispatcher& dispatcher, const CompareRequest& request,
                                   std::chrono::duration<double>* first_summary) {
  const auto start = std::chrono::steady_clock::now();
  auto job = dispatcher.job(dispatcher.submit(request));
  uint64_t seen = 0;
  bool first = true;
  for (;;) {
    auto summary = job->wait_newer(seen, std::chrono::milliseconds(100));
    if (summary) {
      if (first && first_summary != nullptr) {
        *first_summary = std::chrono::steady_clock::now() - start;
      }
      first = false;
      seen = summary->version;
      if (summary->done) return *summary;
      continue;
    }
    const auto status = job->status();
    if (status.phase == JobPhase::kFailed) throw Error("comparison failed: " + status.error);
    if (status.phase == JobPhase::kDone) {
      if (auto last = job->latest()) return *last;
    }
  }
}

}  // namespace reviewlens
