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

#include "reviewlens/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "reviewlens/errors.h"

namespace reviewlens {

namespace {

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void erase_unordered(std::vector<int32_t>& v, int32_t value) {
  auto it = std::find(v.begin(), v.end(), value);
  *it = v.back();
  v.pop_back();
}

}  // namespace

size_t TokenCorpus::token_count() const {
  size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

TokenCorpus token_corpus_of(const ProductCorpus& corpus) {
  TokenCorpus out;
  out.vocab_size = corpus.vocabulary.size();
  out.docs.reserve(corpus.reviews.size());
  for (const auto& r : corpus.reviews) out.docs.push_back(r.token_ids);
  return out;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw ContractError("ModelConfig: " + what); };
  if (k < 2) fail("k must be >= 2");
  if (!(alpha > 0)) fail("alpha must be > 0");
  if (!(beta > 0)) fail("beta must be > 0");
  if (max_iterations < first_emit) fail("max_iterations must be >= first_emit");
  if (first_emit < 1) fail("first_emit must be >= 1");
  if (emit_interval_iterations < 1) fail("emit_interval_iterations must be >= 1");
  if (!(emit_interval_seconds > 0)) fail("emit_interval_seconds must be > 0");
  if (hyperopt_interval < 0 || burn_in < 0) fail("negative hyperopt schedule");
  if (convergence_window < 0) fail("negative convergence window");
  if (likelihood_interval < 1) fail("likelihood_interval must be >= 1");
}

ModelState::ModelState(const TokenCorpus& corpus, const ModelConfig& config)
    : num_topics_(config.k),
      vocab_size_(corpus.vocab_size),
      alpha_(config.k, config.alpha),
      alpha_sum_(config.alpha * config.k),
      beta_(config.beta),
      docs_(corpus.docs),
      rng_(config.seed) {
  if (num_topics_ < 1) throw ContractError("ModelState: k must be >= 1");
  token_count_ = static_cast<int64_t>(corpus.token_count());
  if (token_count_ == 0) throw EmptyCorpusError("ModelState: corpus has no tokens");

  const auto num_docs = docs_.size();
  n_td_.assign(num_docs * num_topics_, 0);
  n_tw_.assign(size_t(vocab_size_) * num_topics_, 0);
  n_t_.assign(num_topics_, 0);
  n_d_.assign(num_docs, 0);
  doc_nz_.resize(num_docs);
  word_nz_.resize(vocab_size_);
  z_.resize(num_docs);

  for (size_t d = 0; d < num_docs; ++d) {
    z_[d].resize(docs_[d].size());
    for (size_t i = 0; i < docs_[d].size(); ++i) {
      const int32_t w = docs_[d][i];
      if (w < 0 || w >= vocab_size_) {
        throw ContractError("ModelState: token id out of vocabulary range");
      }
      const auto t = static_cast<int32_t>(uniform01(rng_) * num_topics_);
      z_[d][i] = t;
      increment(static_cast<int32_t>(d), w, t);
    }
  }
}

void ModelState::set_hyperparameters(std::vector<double> alpha, double beta) {
  if (static_cast<int32_t>(alpha.size()) != num_topics_) {
    throw ContractError("set_hyperparameters: alpha has wrong length");
  }
  alpha_ = std::move(alpha);
  alpha_sum_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
  beta_ = beta;
}

void ModelState::increment(int32_t d, int32_t w, int32_t t) {
  if (n_td_[size_t(d) * num_topics_ + t]++ == 0) doc_nz_[d].push_back(t);
  if (n_tw_[size_t(w) * num_topics_ + t]++ == 0) word_nz_[w].push_back(t);
  ++n_t_[t];
  ++n_d_[d];
}

void ModelState::decrement(int32_t d, int32_t w, int32_t t) {
  if (--n_td_[size_t(d) * num_topics_ + t] == 0) erase_unordered(doc_nz_[d], t);
  if (--n_tw_[size_t(w) * num_topics_ + t] == 0) erase_unordered(word_nz_[w], t);
  --n_t_[t];
  --n_d_[d];
}

void ModelState::reassign(int32_t d, int32_t i, int32_t t) {
  const int32_t w = docs_[d][i];
  decrement(d, w, z_[d][i]);
  z_[d][i] = t;
  increment(d, w, t);
}

CountView ModelState::counts() const {
  return CountView{num_docs(), num_topics_, vocab_size_, n_td_, n_d_, n_tw_, n_t_};
}

bool ModelState::check_invariants() const {
  const int32_t k = num_topics_;
  std::vector<int32_t> td(n_td_.size(), 0), tw(n_tw_.size(), 0), t_tot(k, 0);
  for (int32_t d = 0; d < num_docs(); ++d) {
    for (size_t i = 0; i < docs_[d].size(); ++i) {
      const int32_t t = z_[d][i];
      if (t < 0 || t >= k) return false;
      ++td[size_t(d) * k + t];
      ++tw[size_t(docs_[d][i]) * k + t];
      ++t_tot[t];
    }
  }
  if (td != n_td_ || tw != n_tw_ || t_tot != n_t_) return false;

  int64_t total = 0;
  for (int32_t t = 0; t < k; ++t) total += n_t_[t];
  if (total != token_count_) return false;

  for (int32_t d = 0; d < num_docs(); ++d) {
    int32_t sum = 0;
    int32_t nonzero = 0;
    for (int32_t t = 0; t < k; ++t) {
      sum += doc_topic(d, t);
      nonzero += doc_topic(d, t) > 0;
    }
    if (sum != n_d_[d] || n_d_[d] != static_cast<int32_t>(docs_[d].size())) return false;
    if (nonzero != static_cast<int32_t>(doc_nz_[d].size())) return false;
    for (int32_t t : doc_nz_[d]) {
      if (doc_topic(d, t) == 0) return false;
    }
  }
  for (int32_t w = 0; w < vocab_size_; ++w) {
    int32_t nonzero = 0;
    for (int32_t t = 0; t < k; ++t) nonzero += word_topic(w, t) > 0;
    if (nonzero != static_cast<int32_t>(word_nz_[w].size())) return false;
    for (int32_t t : word_nz_[w]) {
      if (word_topic(w, t) == 0) return false;
    }
  }
  return true;
}

std::vector<double> gibbs_conditional(const ModelState& s, int32_t d, int32_t i) {
  const int32_t k = s.num_topics();
  const int32_t w = s.doc(d)[i];
  const int32_t current = s.assignments(d)[i];
  const double beta = s.beta();
  const double beta_sum = s.beta_sum();
  std::vector<double> p(k);
  double total = 0;
  for (int32_t t = 0; t < k; ++t) {
    const int32_t self = t == current ? 1 : 0;
    const double n_td = s.doc_topic(d, t) - self;
    const double n_tw = s.word_topic(w, t) - self;
    const double n_t = s.topic_total(t) - self;
    p[t] = (n_td + s.alpha()[t]) * (n_tw + beta) / (n_t + beta_sum);
    total += p[t];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> sparse_conditional(const ModelState& s, int32_t d, int32_t i,
                                       BucketSizes* sizes) {
  const int32_t k = s.num_topics();
  const int32_t w = s.doc(d)[i];
  const int32_t current = s.assignments(d)[i];
  const double beta = s.beta();
  const double beta_sum = s.beta_sum();
  const auto alpha = s.alpha();

  auto inv_denom = [&](int32_t t) {
    return 1.0 / (s.topic_total(t) - (t == current ? 1 : 0) + beta_sum);
  };
  auto n_td = [&](int32_t t) { return s.doc_topic(d, t) - (t == current ? 1 : 0); };
  auto n_tw = [&](int32_t t) { return s.word_topic(w, t) - (t == current ? 1 : 0); };

  std::vector<double> p(k);
  double smoothing = 0;
  for (int32_t t = 0; t < k; ++t) {
    p[t] = alpha[t] * beta * inv_denom(t);
    smoothing += p[t];
  }
  double doc_mass = 0;
  for (int32_t t : s.doc_topics(d)) {
    const double term = n_td(t) * beta * inv_denom(t);
    p[t] += term;
    doc_mass += term;
  }
  double word_mass = 0;
  for (int32_t t : s.word_topics(w)) {
    const double term = (alpha[t] + n_td(t)) * n_tw(t) * inv_denom(t);
    p[t] += term;
    word_mass += term;
  }
  if (sizes != nullptr) {
    sizes->doc_terms = static_cast<int32_t>(s.doc_topics(d).size());
    sizes->word_terms = static_cast<int32_t>(s.word_topics(w).size());
  }
  const double total = smoothing + doc_mass + word_mass;
  for (double& x : p) x /= total;
  return p;
}

namespace {

void dense_sweep(ModelState& s) {
  const int32_t k = s.num_topics();
  std::vector<double> cumulative(k);
  for (int32_t d = 0; d < s.num_docs(); ++d) {
    for (int32_t i = 0; i < static_cast<int32_t>(s.doc(d).size()); ++i) {
      const int32_t w = s.doc(d)[i];
      const int32_t current = s.assignments(d)[i];
      double total = 0;
      for (int32_t t = 0; t < k; ++t) {
        const int32_t self = t == current ? 1 : 0;
        total += (s.doc_topic(d, t) - self + s.alpha()[t]) *
                 (s.word_topic(w, t) - self + s.beta()) /
                 (s.topic_total(t) - self + s.beta_sum());
        cumulative[t] = total;
      }
      const double u = uniform01(s.rng()) * total;
      int32_t next = k - 1;
      for (int32_t t = 0; t < k; ++t) {
        if (u < cumulative[t]) {
          next = t;
          break;
        }
      }
      if (next != current) s.reassign(d, i, next);
    }
  }
}

// Bucket sampler. inv_denom[t] = 1 / (n_t + V b) and the smoothing mass are
// kept in sync with the two topics each move touches.
void sparse_sweep(ModelState& s) {
  const int32_t k = s.num_topics();
  const double beta = s.beta();
  const double beta_sum = s.beta_sum();
  const auto alpha = s.alpha();

  std::vector<double> inv_denom(k);
  double smoothing = 0;
  for (int32_t t = 0; t < k; ++t) {
    inv_denom[t] = 1.0 / (s.topic_total(t) + beta_sum);
    smoothing += alpha[t] * beta * inv_denom[t];
  }
  auto refresh = [&](int32_t t, int32_t delta) {
    smoothing -= alpha[t] * beta * inv_denom[t];
    inv_denom[t] = 1.0 / (s.topic_total(t) + delta + beta_sum);
    smoothing += alpha[t] * beta * inv_denom[t];
  };

  std::vector<double> word_terms(k);
  for (int32_t d = 0; d < s.num_docs(); ++d) {
    const auto doc = s.doc(d);
    for (int32_t i = 0; i < static_cast<int32_t>(doc.size()); ++i) {
      const int32_t w = doc[i];
      const int32_t current = s.assignments(d)[i];
      // Counts below read as if token (d, i) were removed.
      refresh(current, -1);
      auto n_td = [&](int32_t t) { return s.doc_topic(d, t) - (t == current ? 1 : 0); };

      double doc_mass = 0;
      for (int32_t t : s.doc_topics(d)) doc_mass += n_td(t) * beta * inv_denom[t];

      const auto word_nz = s.word_topics(w);
      double word_mass = 0;
      for (size_t j = 0; j < word_nz.size(); ++j) {
        const int32_t t = word_nz[j];
        const int32_t n_tw = s.word_topic(w, t) - (t == current ? 1 : 0);
        word_terms[j] = (alpha[t] + n_td(t)) * n_tw * inv_denom[t];
        word_mass += word_terms[j];
      }

      double u = uniform01(s.rng()) * (smoothing + doc_mass + word_mass);
      int32_t next = -1;
      if (u < word_mass) {
        for (size_t j = 0; j < word_nz.size(); ++j) {
          u -= word_terms[j];
          if (u < 0) {
            next = word_nz[j];
            break;
          }
        }
        if (next < 0) next = word_nz.back();
      } else if ((u -= word_mass) < doc_mass) {
        const auto doc_nz = s.doc_topics(d);
        for (int32_t t : doc_nz) {
          u -= n_td(t) * beta * inv_denom[t];
          if (u < 0) {
            next = t;
            break;
          }
        }
        if (next < 0) next = doc_nz.back();
      } else {
        u -= doc_mass;
        for (int32_t t = 0; t < k; ++t) {
          u -= alpha[t] * beta * inv_denom[t];
          if (u < 0) {
            next = t;
            break;
          }
        }
        if (next < 0) next = k - 1;
      }

      if (next != current) {
        s.reassign(d, i, next);
        refresh(current, 0);
        refresh(next, 0);
      } else {
        refresh(current, 0);
      }
    }
  }
}

}  // namespace

void sweep(ModelState& state, SamplerPath path) {
  if (path == SamplerPath::kDense) {
    dense_sweep(state);
  } else {
    sparse_sweep(state);
  }
  state.advance_iteration();
}

double log_likelihood(const ModelState& state, bool parallel) {
  return parallel
             ? kernels::parallel::log_likelihood(state.counts(), state.alpha(), state.beta())
             : kernels::serial::log_likelihood(state.counts(), state.alpha(), state.beta());
}

HyperoptResult optimize_hyperparameters(ModelState& state, const ModelConfig& config) {
  constexpr int kMaxInner = 50;
  constexpr double kRelTolerance = 1e-5;
  constexpr double kFloor = 1e-8;
  constexpr double kRegressionTolerance = 1e-6;

  HyperoptResult result;
  result.alpha.assign(state.alpha().begin(), state.alpha().end());
  result.beta = state.beta();
  if (state.iteration() < config.burn_in) return result;

  const auto counts = state.counts();
  auto alpha_sums = config.parallel_kernels ? kernels::parallel::alpha_digamma_sums
                                            : kernels::serial::alpha_digamma_sums;
  auto beta_sums = config.parallel_kernels ? kernels::parallel::beta_digamma_sums
                                           : kernels::serial::beta_digamma_sums;

  std::vector<double> alpha = result.alpha;
  bool alpha_changed = false;
  for (int it = 0; it < kMaxInner; ++it) {
    const auto sums = alpha_sums(counts, alpha);
    if (!(sums.denominator > 0)) break;
    double max_rel = 0;
    for (size_t t = 0; t < alpha.size(); ++t) {
      const double next = std::max(kFloor, alpha[t] * sums.numerator[t] / sums.denominator);
      max_rel = std::max(max_rel, std::abs(next - alpha[t]) / alpha[t]);
      alpha[t] = next;
    }
    alpha_changed = true;
    if (max_rel < kRelTolerance) break;
  }

  double beta = result.beta;
  bool beta_changed = false;
  for (int it = 0; it < kMaxInner; ++it) {
    const auto sums = beta_sums(counts, beta);
    if (!(sums.denominator > 0)) break;
    const double next = std::max(kFloor, beta * sums.numerator / sums.denominator);
    const double rel = std::abs(next - beta) / beta;
    beta = next;
    beta_changed = true;
    if (rel < kRelTolerance) break;
  }
  if (!alpha_changed && !beta_changed) return result;

  const std::vector<double> old_alpha = result.alpha;
  const double old_beta = result.beta;
  result.log_likelihood_before = log_likelihood(state, config.parallel_kernels);
  state.set_hyperparameters(alpha, beta);
  result.log_likelihood_after = log_likelihood(state, config.parallel_kernels);

  const double floor = result.log_likelihood_before -
                       kRegressionTolerance * std::abs(result.log_likelihood_before);
  if (result.log_likelihood_after < floor) {
    state.set_hyperparameters(old_alpha, old_beta);
    return result;
  }
  result.applied = true;
  result.alpha = std::move(alpha);
  result.beta = beta;
  return result;
}

ModelSnapshot make_snapshot(const ModelState& state, bool parallel) {
  const auto counts = state.counts();
  ModelSnapshot snap;
  snap.iteration = state.iteration();
  snap.log_likelihood = log_likelihood(state, parallel);
  snap.alpha.assign(state.alpha().begin(), state.alpha().end());
  snap.beta = state.beta();
  if (parallel) {
    snap.theta = kernels::parallel::estimate_theta(counts, state.alpha());
    snap.phi = kernels::parallel::estimate_phi(counts, state.beta());
  } else {
    snap.theta = kernels::serial::estimate_theta(counts, state.alpha());
    snap.phi = kernels::serial::estimate_phi(counts, state.beta());
  }
  snap.word_topic.assign(counts.word_topic.begin(), counts.word_topic.end());
  snap.topic_total.assign(counts.topic_total.begin(), counts.topic_total.end());
  snap.topic_probability.resize(state.num_topics());
  for (int32_t t = 0; t < state.num_topics(); ++t) {
    snap.topic_probability[t] =
        static_cast<double>(state.topic_total(t)) / static_cast<double>(state.token_count());
  }
  return snap;
}

std::shared_ptr<const ModelSnapshot> run(const TokenCorpus& corpus,
                                         const ModelConfig& config, const EmitFn& emit,
                                         std::stop_token stop) {
  using Clock = std::chrono::steady_clock;
  config.validate();
  ModelState state(corpus, config);

  auto last_emit_time = Clock::now();
  std::shared_ptr<const ModelSnapshot> last;
  std::map<int32_t, double> ll_history;

  auto do_emit = [&] {
    last = std::make_shared<const ModelSnapshot>(make_snapshot(state, config.parallel_kernels));
    last_emit_time = Clock::now();
    if (emit) emit(last);
  };

  for (int32_t it = 1; it <= config.max_iterations; ++it) {
    if (stop.stop_requested()) break;
    sweep(state, config.sampler);

    if (config.hyperopt_interval > 0 && it >= config.burn_in &&
        it % config.hyperopt_interval == 0) {
      optimize_hyperparameters(state, config);
    }

    bool due = false;
    if (it == config.first_emit) {
      due = true;
    } else if (it > config.first_emit) {
      if (config.emission_mode == EmissionMode::kIterations) {
        due = (it - config.first_emit) % config.emit_interval_iterations == 0;
      } else {
        const std::chrono::duration<double> since = Clock::now() - last_emit_time;
        due = since.count() >= config.emit_interval_seconds;
      }
    }
    if (due) do_emit();

    if (config.convergence_window > 0 && it % config.likelihood_interval == 0) {
      const double ll = log_likelihood(state, config.parallel_kernels);
      ll_history[it] = ll;
      auto past = ll_history.find(it - config.convergence_window);
      if (past != ll_history.end() && it >= config.first_emit &&
          std::abs(ll - past->second) < config.convergence_tolerance * std::abs(past->second)) {
        break;
      }
    }
  }
  if (!last || last->iteration != state.iteration()) do_emit();
  return last;
}

}  // namespace reviewlens
