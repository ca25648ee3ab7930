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

// Synthetic corpora shared by the tests and the acceptance binary.

#ifndef REVIEWLENS_TESTS_SYNTHETIC_H_
#define REVIEWLENS_TESTS_SYNTHETIC_H_

#include <random>
#include <string>
#include <vector>

#include "reviewlens/engine.h"
#include "reviewlens/ingest.h"

namespace reviewlens::testing {

inline std::vector<double> sample_dirichlet(std::mt19937_64& rng, const std::vector<double>& alpha) {
  std::vector<double> out(alpha.size());
  double sum = 0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    out[i] = std::gamma_distribution<double>(alpha[i], 1.0)(rng);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

// Draws documents from the LDA generative process with fixed topics phi.
inline TokenCorpus generate_lda(const std::vector<std::vector<double>>& phi,
                                const std::vector<double>& alpha, size_t num_docs,
                                size_t doc_length, uint64_t seed) {
  std::mt19937_64 rng(seed);
  TokenCorpus corpus;
  corpus.vocab_size = static_cast<int32_t>(phi.front().size());
  std::vector<std::discrete_distribution<int32_t>> words;
  for (const auto& row : phi) words.emplace_back(row.begin(), row.end());
  for (size_t d = 0; d < num_docs; ++d) {
    const auto theta = sample_dirichlet(rng, alpha);
    std::discrete_distribution<int32_t> topic(theta.begin(), theta.end());
    std::vector<int32_t> doc(doc_length);
    for (auto& w : doc) w = words[topic(rng)](rng);
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

// Alphabetic pseudo-word unique to (topic, index).
inline std::string pseudo_word(int topic, int index) {
  std::string w = "w";
  w += static_cast<char>('a' + topic % 26);
  w += static_cast<char>('a' + (topic / 26) % 26);
  w += static_cast<char>('a' + index % 26);
  w += static_cast<char>('a' + (index / 26) % 26);
  return w;
}

// Reviews for one product. Each review mixes a few themes, each theme has
// its own vocabulary and a rating tendency. Theme offsets make two products
// share some themes.
inline std::vector<RawReview> synthetic_reviews(const std::string& product_id,
                                                const std::string& title, size_t count,
                                                uint64_t seed, int theme_offset = 0,
                                                int themes = 6, size_t words_per_review = 40) {
  constexpr int kWordsPerTheme = 30;
  std::mt19937_64 rng(seed);
  std::vector<RawReview> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const auto mix = sample_dirichlet(rng, std::vector<double>(themes, 0.3));
    std::discrete_distribution<int> theme(mix.begin(), mix.end());
    std::geometric_distribution<int> rank(0.12);
    RawReview r;
    r.product_id = product_id;
    r.product_title = title;
    r.user_id = "U" + std::to_string(seed % 997) + "X" + std::to_string(i);
    r.profile_name = "user " + std::to_string(i);
    r.helpful_votes = static_cast<int64_t>(rng() % 5);
    r.unhelpful_votes = static_cast<int64_t>(rng() % 3);
    r.timestamp = 1300000000 + static_cast<int64_t>(i) * 3600;
    r.summary = "review " + std::to_string(i);
    int dominant = 0;
    for (int t = 1; t < themes; ++t) {
      if (mix[t] > mix[dominant]) dominant = t;
    }
    r.rating = 1 + (dominant + theme_offset) % 5;
    for (size_t j = 0; j < words_per_review; ++j) {
      if (j) r.text += ' ';
      r.text += pseudo_word(theme(rng) + theme_offset, std::min(rank(rng), kWordsPerTheme - 1));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace reviewlens::testing

#endif  // REVIEWLENS_TESTS_SYNTHETIC_H_
