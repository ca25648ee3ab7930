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

// Reference kernels. Straight loops, no threading.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>

#include "reviewlens/kernels.h"

namespace reviewlens::kernels::serial {

using boost::math::digamma;

double log_likelihood(const CountView& c, std::span<const double> alpha,
                      double beta) {
  const int32_t k = c.num_topics;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  const double beta_sum = beta * c.vocab_size;

  std::vector<double> lgamma_alpha(k);
  for (int32_t t = 0; t < k; ++t) lgamma_alpha[t] = log_gamma(alpha[t]);
  const double lgamma_alpha_sum = log_gamma(alpha_sum);

  double ll = 0;
  for (int32_t d = 0; d < c.num_docs; ++d) {
    if (c.doc_length[d] == 0) continue;
    double doc = lgamma_alpha_sum - log_gamma(alpha_sum + c.doc_length[d]);
    const int32_t* row = c.doc_topic.data() + size_t(d) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      doc += log_gamma(alpha[t] + row[t]) - lgamma_alpha[t];
    }
    ll += doc;
  }

  const double lgamma_beta = log_gamma(beta);
  const double lgamma_beta_sum = log_gamma(beta_sum);
  for (int32_t t = 0; t < k; ++t) {
    if (c.topic_total[t] == 0) continue;
    ll += lgamma_beta_sum - log_gamma(beta_sum + c.topic_total[t]);
  }
  for (int32_t w = 0; w < c.vocab_size; ++w) {
    const int32_t* row = c.word_topic.data() + size_t(w) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      ll += log_gamma(beta + row[t]) - lgamma_beta;
    }
  }
  return ll;
}

AlphaSums alpha_digamma_sums(const CountView& c, std::span<const double> alpha) {
  const int32_t k = c.num_topics;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  AlphaSums out;
  out.numerator.assign(k, 0.0);
  std::vector<double> digamma_alpha(k);
  for (int32_t t = 0; t < k; ++t) digamma_alpha[t] = digamma(alpha[t]);
  const double digamma_alpha_sum = digamma(alpha_sum);

  for (int32_t d = 0; d < c.num_docs; ++d) {
    if (c.doc_length[d] == 0) continue;
    out.denominator += digamma(c.doc_length[d] + alpha_sum) - digamma_alpha_sum;
    const int32_t* row = c.doc_topic.data() + size_t(d) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      out.numerator[t] += digamma(row[t] + alpha[t]) - digamma_alpha[t];
    }
  }
  return out;
}

BetaSums beta_digamma_sums(const CountView& c, double beta) {
  const int32_t k = c.num_topics;
  const double beta_sum = beta * c.vocab_size;
  const double digamma_beta = digamma(beta);
  const double digamma_beta_sum = digamma(beta_sum);
  BetaSums out;
  for (int32_t w = 0; w < c.vocab_size; ++w) {
    const int32_t* row = c.word_topic.data() + size_t(w) * k;
    for (int32_t t = 0; t < k; ++t) {
      if (row[t] == 0) continue;
      out.numerator += digamma(row[t] + beta) - digamma_beta;
    }
  }
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
  for (int32_t i = 0; i < a.rows; ++i) {
    for (int32_t j = 0; j < b.rows; ++j) {
      double bc = 0;
      for (int32_t w = 0; w < a.cols; ++w) bc += std::sqrt(a(i, w) * b(j, w));
      out(i, j) = std::clamp(std::sqrt(std::max(0.0, 1.0 - bc)), 0.0, 1.0);
    }
  }
  return out;
}

std::vector<PreprocessedReview> preprocess_batch(
    std::span<const RawReview> reviews,
    const std::unordered_set<std::string>& name_words) {
  std::vector<PreprocessedReview> out;
  out.reserve(reviews.size());
  for (const auto& r : reviews) out.push_back(preprocess(r, name_words));
  return out;
}

}  // namespace reviewlens::kernels::serial
