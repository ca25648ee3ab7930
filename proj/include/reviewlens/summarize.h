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

// Turns model snapshots into what the UI shows: rated topics with top words,
// the nearest topic of the other product, a representative review per topic
// and text-free review summaries.

#ifndef REVIEWLENS_SUMMARIZE_H_
#define REVIEWLENS_SUMMARIZE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reviewlens/engine.h"
#include "reviewlens/ingest.h"
#include "reviewlens/kernels.h"

namespace reviewlens {

inline constexpr int32_t kMaxLemmas = 30;
inline constexpr int32_t kTopReviewsPerTopic = 5;

struct AugmentedLemma {
  std::string word;
  int32_t count = 0;    // n_tw
  double weight = 0;    // phi_tw
};

struct TopicSummary {
  int32_t topic = 0;
  double probability = 0;
  std::vector<AugmentedLemma> lemmas;
  double rating = 0;
  int32_t nearest_topic = -1;  // topic id on the other side
  double nearest_distance = 1;
  int32_t similarity_percent = 0;
  ReviewId representative_review;
  std::vector<ReviewId> top_reviews;  // by theta_dt, descending
};

struct ReviewSummary {
  ReviewMeta meta;
  std::vector<double> theta;
};

struct ProductSummary {
  std::string product_id;
  std::string title;
  int32_t num_topics = 0;  // k of the underlying model
  std::vector<TopicSummary> topics;  // by probability, descending
  std::vector<ReviewSummary> reviews;
};

// Instance is filled by the caller that knows it.
struct SideStamp {
  size_t instance = 0;
  int32_t iteration = 0;
  double log_likelihood = 0;
};

struct ComparisonSummary {
  std::string job_id;
  uint64_t version = 0;
  bool done = false;
  SideStamp reference_stamp;
  SideStamp other_stamp;
  ProductSummary reference;
  ProductSummary other;
};

// E_{d ~ theta_.t}[r(d)]. Throws UndefinedRatingError on an all-zero column.
double topic_rating(std::span<const double> theta_column, std::span<const int> ratings);

// sqrt(1 - sum sqrt(p q)) clamped to [0, 1]. Both inputs must be nonnegative
// and sum to 1 within 1e-6 (ContractError otherwise).
double hellinger(std::span<const double> p, std::span<const double> q);

// theta_dt / (|r(d) - R_t| - 0.1 [h+ - h- > 0] + 1)
double representative_score(double theta_dt, int rating, double topic_rating,
                            int64_t helpful, int64_t unhelpful);

// argmax of representative_score over reviews; ties to the earliest
// timestamp, then the smaller review id. reviews[d] matches theta row d.
ReviewId representative_review(int32_t topic, const Matrix& theta,
                               std::span<const ReviewMeta> reviews, double topic_rating);

int32_t topic_similarity_percent(double distance);

struct TopicMatch {
  int32_t topic = -1;
  double distance = 1;
};

// Nearest b-row for each a-row by Hellinger distance, ties to the lowest index.
// Rows must already be aligned over a shared vocabulary.
std::vector<TopicMatch> match_topics(const Matrix& phi_a, const Matrix& phi_b,
                                     bool parallel = false);

struct AlignedPhi {
  std::vector<std::string> vocabulary;  // union; a's words first
  Matrix a;
  Matrix b;
};

// Zero-pads both phi matrices onto the union vocabulary and renormalizes rows.
AlignedPhi align_phi(const Matrix& phi_a, std::span<const std::string> vocab_a,
                     const Matrix& phi_b, std::span<const std::string> vocab_b);

struct SideInput {
  std::string product_id;
  std::string title;
  const ModelSnapshot* snapshot = nullptr;
  const Vocabulary* vocabulary = nullptr;
  std::span<const ReviewMeta> reviews;  // aligned with snapshot theta rows
};

// Topics with undefined rating are dropped and the remaining probabilities
// renormalized.
ComparisonSummary build_comparison(const SideInput& reference, const SideInput& other,
                                   bool parallel = false);

// Review indices ordered by theta_dt descending, ties by review id.
std::vector<size_t> reviews_by_topic(std::span<const ReviewSummary> reviews, int32_t topic);

}  // namespace reviewlens

#endif  // REVIEWLENS_SUMMARIZE_H_
