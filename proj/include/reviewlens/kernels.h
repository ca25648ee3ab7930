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

// Data-parallel kernels over topic-model count matrices and distributions.
//
// Every kernel exists twice with the same signature: `serial::` is the
// reference implementation the tests check against, `parallel::` is the
// OpenMP version. Reductions in the parallel versions may differ from the
// serial ones in the last few ulps because summation order changes.

#ifndef REVIEWLENS_KERNELS_H_
#define REVIEWLENS_KERNELS_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "reviewlens/ingest.h"

namespace reviewlens {

// Read-only view of collapsed-LDA sufficient statistics.
//   doc_topic:  num_docs x num_topics, row-major
//   word_topic: vocab_size x num_topics, row-major
struct CountView {
  int32_t num_docs = 0;
  int32_t num_topics = 0;
  int32_t vocab_size = 0;
  std::span<const int32_t> doc_topic;
  std::span<const int32_t> doc_length;
  std::span<const int32_t> word_topic;
  std::span<const int32_t> topic_total;
};

// Row-major dense matrix of doubles.
struct Matrix {
  int32_t rows = 0;
  int32_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int32_t r, int32_t c) : rows(r), cols(c), data(size_t(r) * c, 0.0) {}
  double& operator()(int32_t r, int32_t c) { return data[size_t(r) * cols + c]; }
  double operator()(int32_t r, int32_t c) const { return data[size_t(r) * cols + c]; }
  std::span<const double> row(int32_t r) const {
    return {data.data() + size_t(r) * cols, size_t(cols)};
  }
};

struct AlphaSums {
  std::vector<double> numerator;  // per topic: sum_d psi(n_td + a_t) - psi(a_t)
  double denominator = 0;         // sum_d psi(n_d + a_sum) - psi(a_sum)
};

struct BetaSums {
  double numerator = 0;    // sum_t sum_w psi(n_tw + b) - psi(b)
  double denominator = 0;  // V * sum_t psi(n_t + V b) - psi(V b)
};

#define REVIEWLENS_KERNEL_DECLS                                                \
  /* log p(w, z | alpha, beta) of the collapsed model. */                      \
  double log_likelihood(const CountView& counts, std::span<const double> alpha, \
                        double beta);                                          \
  AlphaSums alpha_digamma_sums(const CountView& counts,                        \
                               std::span<const double> alpha);                 \
  BetaSums beta_digamma_sums(const CountView& counts, double beta);            \
  /* theta_dt = (n_td + a_t) / (n_d + a_sum); empty documents get 1/k. */      \
  Matrix estimate_theta(const CountView& counts, std::span<const double> alpha); \
  /* phi_tw = (n_tw + b) / (n_t + V b); num_topics x vocab_size. */            \
  Matrix estimate_phi(const CountView& counts, double beta);                   \
  /* Hellinger distance between every row of a and every row of b. */          \
  Matrix pairwise_hellinger(const Matrix& a, const Matrix& b);                 \
  std::vector<PreprocessedReview> preprocess_batch(                            \
      std::span<const RawReview> reviews,                                      \
      const std::unordered_set<std::string>& name_words);

namespace kernels {

// log|Gamma(x)| without touching the global signgam, so concurrent samplers
// may call it.
inline double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

namespace serial {
REVIEWLENS_KERNEL_DECLS
}  // namespace serial
namespace parallel {
REVIEWLENS_KERNEL_DECLS
}  // namespace parallel
}  // namespace kernels

#undef REVIEWLENS_KERNEL_DECLS

}  // namespace reviewlens

#endif  // REVIEWLENS_KERNELS_H_
