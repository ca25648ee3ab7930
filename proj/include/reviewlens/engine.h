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

// Collapsed Gibbs sampler for LDA over one product's reviews.
//
// The per-token conditional is
//
//   p(z = t | rest) ∝ (n_td + a_t) (n_tw + b) / (n_t + V b)
//
// with all counts excluding the token being resampled. The sparse path splits
// it into a smoothing bucket a_t b / (n_t + V b) summed over all topics and
// cached, a document bucket over the k_d topics present in the document and a
// word bucket over the k_w topics present for the word.

#ifndef REVIEWLENS_ENGINE_H_
#define REVIEWLENS_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stop_token>
#include <vector>

#include "reviewlens/ingest.h"
#include "reviewlens/kernels.h"

namespace reviewlens {

// Token-id documents over a dense vocabulary [0, vocab_size).
struct TokenCorpus {
  std::vector<std::vector<int32_t>> docs;
  int32_t vocab_size = 0;

  size_t token_count() const;
};

TokenCorpus token_corpus_of(const ProductCorpus& corpus);

enum class EmissionMode { kIterations, kWallClock };
enum class SamplerPath { kDense, kSparse };

struct ModelConfig {
  int32_t k = 10;
  double alpha = 0.5;  // initial symmetric per-topic value
  double beta = 0.01;
  int32_t max_iterations = 1000;
  int32_t burn_in = 100;
  int32_t hyperopt_interval = 100;  // 0 disables hyperparameter optimization

  int32_t first_emit = 10;
  EmissionMode emission_mode = EmissionMode::kWallClock;
  int32_t emit_interval_iterations = 5;
  double emit_interval_seconds = 2.0;

  // Stop when |ll(i) - ll(i - window)| < tolerance * |ll(i - window)|.
  // window = 0 runs to max_iterations.
  int32_t convergence_window = 50;
  double convergence_tolerance = 1e-4;
  int32_t likelihood_interval = 10;

  uint64_t seed = 1;
  SamplerPath sampler = SamplerPath::kSparse;
  bool parallel_kernels = false;

  void validate() const;  // throws ContractError
};

class ModelState {
 public:
  // Assigns every token a uniformly random topic. Throws EmptyCorpusError
  // when the corpus has no tokens.
  ModelState(const TokenCorpus& corpus, const ModelConfig& config);

  int32_t num_topics() const { return num_topics_; }
  int32_t num_docs() const { return static_cast<int32_t>(docs_.size()); }
  int32_t vocab_size() const { return vocab_size_; }
  int64_t token_count() const { return token_count_; }
  int32_t iteration() const { return iteration_; }

  std::span<const double> alpha() const { return alpha_; }
  double alpha_sum() const { return alpha_sum_; }
  double beta() const { return beta_; }
  double beta_sum() const { return beta_ * vocab_size_; }
  void set_hyperparameters(std::vector<double> alpha, double beta);

  std::span<const int32_t> doc(int32_t d) const { return docs_[d]; }
  std::span<const int32_t> assignments(int32_t d) const { return z_[d]; }
  int32_t doc_topic(int32_t d, int32_t t) const { return n_td_[size_t(d) * num_topics_ + t]; }
  int32_t word_topic(int32_t w, int32_t t) const { return n_tw_[size_t(w) * num_topics_ + t]; }
  int32_t topic_total(int32_t t) const { return n_t_[t]; }
  int32_t doc_length(int32_t d) const { return n_d_[d]; }

  // Topics with a nonzero count in document d / for word w, unordered.
  std::span<const int32_t> doc_topics(int32_t d) const { return doc_nz_[d]; }
  std::span<const int32_t> word_topics(int32_t w) const { return word_nz_[w]; }

  CountView counts() const;

  // Moves token (d, i) to topic t, keeping every count and index in sync.
  void reassign(int32_t d, int32_t i, int32_t t);

  // Full consistency check of counts against assignments. O(tokens + D k + V k).
  bool check_invariants() const;

  std::mt19937_64& rng() { return rng_; }
  void advance_iteration() { ++iteration_; }

 private:
  void increment(int32_t d, int32_t w, int32_t t);
  void decrement(int32_t d, int32_t w, int32_t t);

  int32_t num_topics_ = 0;
  int32_t vocab_size_ = 0;
  int64_t token_count_ = 0;
  int32_t iteration_ = 0;
  std::vector<double> alpha_;
  double alpha_sum_ = 0;
  double beta_ = 0;

  std::vector<std::vector<int32_t>> docs_;
  std::vector<std::vector<int32_t>> z_;
  std::vector<int32_t> n_td_;  // num_docs x k
  std::vector<int32_t> n_tw_;  // vocab_size x k
  std::vector<int32_t> n_t_;
  std::vector<int32_t> n_d_;
  std::vector<std::vector<int32_t>> doc_nz_;
  std::vector<std::vector<int32_t>> word_nz_;
  std::mt19937_64 rng_;
};

// Conditional over topics for token (d, i), excluding its current assignment.
std::vector<double> gibbs_conditional(const ModelState& state, int32_t d, int32_t i);

// Number of terms each sparse bucket enumerated.
struct BucketSizes {
  int32_t doc_terms = 0;
  int32_t word_terms = 0;
};

// Same distribution as gibbs_conditional, assembled from the three buckets.
std::vector<double> sparse_conditional(const ModelState& state, int32_t d,
                                       int32_t i, BucketSizes* sizes = nullptr);

// One pass over every token in document order.
void sweep(ModelState& state, SamplerPath path = SamplerPath::kSparse);

double log_likelihood(const ModelState& state, bool parallel = false);

struct HyperoptResult {
  bool applied = false;  // false when skipped or reverted
  std::vector<double> alpha;
  double beta = 0;
  double log_likelihood_before = 0;
  double log_likelihood_after = 0;
};

// Minka fixed-point updates of asymmetric alpha and symmetric beta.
HyperoptResult optimize_hyperparameters(ModelState& state, const ModelConfig& config);

struct ModelSnapshot {
  int32_t iteration = 0;
  double log_likelihood = 0;
  std::vector<double> alpha;
  double beta = 0;
  Matrix theta;  // num_docs x k
  Matrix phi;    // k x vocab_size
  std::vector<int32_t> word_topic;  // vocab_size x k raw counts
  std::vector<int32_t> topic_total;
  std::vector<double> topic_probability;  // n_t / N

  int32_t num_topics() const { return static_cast<int32_t>(topic_total.size()); }
  int32_t vocab_size() const { return phi.cols; }
  int32_t word_count(int32_t t, int32_t w) const {
    return word_topic[size_t(w) * num_topics() + t];
  }
};

ModelSnapshot make_snapshot(const ModelState& state, bool parallel = false);

using EmitFn = std::function<void(std::shared_ptr<const ModelSnapshot>)>;

// Samples to max_iterations or convergence, emitting snapshots on the
// configured schedule and always once at the end. Returns the final snapshot.
// A stop request ends sampling early; the final snapshot is still emitted.
std::shared_ptr<const ModelSnapshot> run(const TokenCorpus& corpus,
                                         const ModelConfig& config,
                                         const EmitFn& emit,
                                         std::stop_token stop = {});

}  // namespace reviewlens

#endif  // REVIEWLENS_ENGINE_H_
