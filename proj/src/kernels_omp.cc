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

// OpenMP kernels. Same contracts as kernels_serial.cc.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>

#include "reviewlens/kernels.h"

namespace reviewlens::kernels::parallel {

using boost::math::digamma;

double log_likelihood(const CountView& c, std::span<const double> alpha,
                      double beta) {
  const int32_t k = c.num_topics;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  const double beta_sum = beta * c.vocab_size;

  std::vector<double> lgamma_alpha(k);
  for (int32_t t = 0; t < k; ++t) lgamma_alpha[t] = log_gamma(alpha[t]);
  const double lgamma_alpha_sum = log_gamma(alpha_sum);
  const double lgamma_beta = log_gamma(beta);
  const double lgamma_beta_sum = log_gamma(beta_sum);

  double docs = 0;
#pragma omp parallel for reduction(+ : docs) schedule(static)
  for (int32_t d = 0; d < c.num_docs; ++d) {
    if (c.doc_length[d] == 0) continue;
    double doc = lgamma_alpha_sum - log_gamma(alpha_sum + c.doc_length[d]);
    const int32_t* row = c.doc_topic.data() + size_t(d) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      doc += log_gamma(alpha[t] + row[t]) - lgamma_alpha[t];
    }
    docs += doc;
  }

  double words = 0;
#pragma omp parallel for reduction(+ : words) schedule(static)
  for (int32_t w = 0; w < c.vocab_size; ++w) {
    const int32_t* row = c.word_topic.data() + size_t(w) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      words += log_gamma(beta + row[t]) - lgamma_beta;
    }
  }

  double topics = 0;
  for (int32_t t = 0; t < k; ++t) {
    if (c.topic_total[t] == 0) continue;
    topics += lgamma_beta_sum - log_gamma(beta_sum + c.topic_total[t]);
  }
  return docs + topics + words;
}

AlphaSums alpha_digamma_sums(const CountView& c, std::span<const double> alpha) {
  const int32_t k = c.num_topics;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  std::vector<double> digamma_alpha(k);
  for (int32_t t = 0; t < k; ++t) digamma_alpha[t] = digamma(alpha[t]);
  const double digamma_alpha_sum = digamma(alpha_sum);

  AlphaSums out;
  out.numerator.assign(k, 0.0);
  double denominator = 0;
  double* numerator = out.numerator.data();
#pragma omp parallel for reduction(+ : denominator) reduction(+ : numerator[:k]) schedule(static)
  for (int32_t d = 0; d < c.num_docs; ++d) {
    if (c.doc_length[d] == 0) continue;
    denominator += digamma(c.doc_length[d] + alpha_sum) - digamma_alpha_sum;
    const int32_t* row = c.doc_topic.data() + size_t(d) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      numerator[t] += digamma(row[t] + alpha[t]) - digamma_alpha[t];
    }
  }
  out.denominator = denominator;
  return out;
}

BetaSums beta_digamma_sums(const CountView& c, double beta) {
  const int32_t k = c.num_topics;
  const double beta_sum = beta * c.vocab_size;
  const double digamma_beta = digamma(beta);
  const double digamma_beta_sum = digamma(beta_sum);

  double numerator = 0;
#pragma omp parallel for reduction(+ : numerator) schedule(static)
  for (int32_t w = 0; w < c.vocab_size; ++w) {
    const int32_t* row = c.word_topic.data() + size_t(w) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      numerator += digamma(row[t] + beta) - digamma_beta;
    }
  }
  BetaSums out;
  out.numerator = numerator;
  for (int32_t t = 0; t < k; ++t) {
    if (c.topic_total[t] == 0) continue;
    out.denominator += digamma(c.topic_total[t] + beta_sum) - digamma_beta_sum;
  }
  out.denominator *= c.vocab_size;
  return out;
}

Matrix estimate_theta(const CountView& c, std::span<const double> alpha) {
  const int32_t k = c.num_topics;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  Matrix theta(c.num_docs, k);
#pragma omp parallel for schedule(static)
  for (int32_t d = 0; d < c.num_docs; ++d) {
    if (c.doc_length[d] == 0) {
      for (int32_t t = 0; t < k; ++t) theta(d, t) = 1.0 / k;
      continue;
    }
    const double norm = c.doc_length[d] + alpha_sum;
    const int32_t* row = c.doc_topic.data() + size_t(d) * k;
    for (int32_t t = 0; t < k; ++t) theta(d, t) = (row[t] + alpha[t]) / norm;
  }
  return theta;
}

Matrix estimate_phi(const CountView& c, double beta) {
  const int32_t k = c.num_topics;
  const double beta_sum = beta * c.vocab_size;
  Matrix phi(k, c.vocab_size);
#pragma omp parallel for schedule(static)
  for (int32_t w = 0; w < c.vocab_size; ++w) {
    const int32_t* row = c.word_topic.data() + size_t(w) * k;
    for (int32_t t = 0; t < k; ++t) {
      phi(t, w) = (row[t] + beta) / (c.topic_total[t] + beta_sum);
    }
  }
  return phi;
}

Matrix pairwise_hellinger(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.rows);
  const int32_t pairs = a.rows * b.rows;
#pragma omp parallel for schedule(dynamic)
  for (int32_t p = 0; p < pairs; ++p) {
    const int32_t i = p / b.rows;
    const int32_t j = p % b.rows;
    double bc = 0;
    for (int32_t w = 0; w < a.cols; ++w) bc += std::sqrt(a(i, w) * b(j, w));
    out(i, j) = std::clamp(std::sqrt(std::max(0.0, 1.0 - bc)), 0.0, 1.0);
  }
  return out;
}

std::vector<PreprocessedReview> preprocess_batch(
    std::span<const RawReview> reviews,
    const std::unordered_set<std::string>& name_words) {
  std::vector<PreprocessedReview> out(reviews.size());
  const auto n = static_cast<int64_t>(reviews.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i) out[i] = preprocess(reviews[i], name_words);
  return out;
}

}  // namespace reviewlens::kernels::parallel
