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

#include "reviewlens/summarize.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "reviewlens/errors.h"

namespace reviewlens {

namespace {

constexpr double kNormTolerance = 1e-6;

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0;
  for (double x : p) {
    if (x < 0 || !std::isfinite(x)) {
      throw ContractError(std::string("hellinger: ") + name + " has a negative entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw ContractError(std::string("hellinger: ") + name + " sums to " +
                        std::to_string(sum));
  }
}

std::vector<AugmentedLemma> top_lemmas(const ModelSnapshot& snap, const Vocabulary& vocab,
                                       int32_t t) {
  std::vector<int32_t> words;
  for (int32_t w = 0; w < snap.vocab_size(); ++w) {
    if (snap.word_count(t, w) > 0) words.push_back(w);
  }
  const auto keep = std::min<size_t>(words.size(), kMaxLemmas);
  std::partial_sort(words.begin(), words.begin() + keep, words.end(),
                    [&](int32_t x, int32_t y) {
                      const auto cx = snap.word_count(t, x);
                      const auto cy = snap.word_count(t, y);
                      return cx != cy ? cx > cy : x < y;
                    });
  words.resize(keep);
  std::vector<AugmentedLemma> out;
  out.reserve(keep);
  for (int32_t w : words) {
    out.push_back({vocab.word(w), snap.word_count(t, w), snap.phi(t, w)});
  }
  return out;
}

struct SideTopics {
  std::vector<int32_t> kept;     // topic ids with a defined rating
  std::vector<double> ratings;   // aligned with kept
};

SideTopics rate_topics(const SideInput& side) {
  const auto& theta = side.snapshot->theta;
  std::vector<int> ratings;
  ratings.reserve(side.reviews.size());
  for (const auto& r : side.reviews) ratings.push_back(r.rating);

  SideTopics out;
  std::vector<double> column(theta.rows);
  for (int32_t t = 0; t < theta.cols; ++t) {
    for (int32_t d = 0; d < theta.rows; ++d) column[d] = theta(d, t);
    try {
      out.ratings.push_back(topic_rating(column, ratings));
      out.kept.push_back(t);
    } catch (const UndefinedRatingError&) {
    }
  }
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const int32_t> rows) {
  Matrix out(static_cast<int32_t>(rows.size()), m.cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(m.row(rows[i]).data(), m.cols, out.data.data() + i * m.cols);
  }
  return out;
}

ProductSummary summarize_side(const SideInput& side, const SideTopics& rated,
                              const std::vector<TopicMatch>& matches,
                              std::span<const int32_t> other_kept) {
  const auto& snap = *side.snapshot;
  ProductSummary out;
  out.product_id = side.product_id;
  out.title = side.title;
  out.num_topics = snap.num_topics();

  double kept_mass = 0;
  for (int32_t t : rated.kept) kept_mass += snap.topic_probability[t];

  for (size_t i = 0; i < rated.kept.size(); ++i) {
    const int32_t t = rated.kept[i];
    TopicSummary ts;
    ts.topic = t;
    ts.probability = kept_mass > 0 ? snap.topic_probability[t] / kept_mass
                                   : 1.0 / static_cast<double>(rated.kept.size());
    ts.lemmas = top_lemmas(snap, *side.vocabulary, t);
    ts.rating = rated.ratings[i];
    if (matches[i].topic >= 0) {
      ts.nearest_topic = other_kept[matches[i].topic];
      ts.nearest_distance = matches[i].distance;
    }
    ts.similarity_percent = topic_similarity_percent(ts.nearest_distance);
    ts.representative_review = representative_review(t, snap.theta, side.reviews, ts.rating);

    std::vector<int32_t> order(side.reviews.size());
    std::iota(order.begin(), order.end(), 0);
    const auto keep = std::min<size_t>(order.size(), kTopReviewsPerTopic);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](int32_t x, int32_t y) {
                        const double tx = snap.theta(x, t), ty = snap.theta(y, t);
                        return tx != ty ? tx > ty
                                        : side.reviews[x].review_id < side.reviews[y].review_id;
                      });
    for (size_t j = 0; j < keep; ++j) ts.top_reviews.push_back(side.reviews[order[j]].review_id);
    out.topics.push_back(std::move(ts));
  }
  std::stable_sort(out.topics.begin(), out.topics.end(),
                   [](const TopicSummary& x, const TopicSummary& y) {
                     return x.probability != y.probability ? x.probability > y.probability
                                                           : x.topic < y.topic;
                   });

  out.reviews.reserve(side.reviews.size());
  for (size_t d = 0; d < side.reviews.size(); ++d) {
    auto row = snap.theta.row(static_cast<int32_t>(d));
    out.reviews.push_back({side.reviews[d], {row.begin(), row.end()}});
  }
  return out;
}

}  // namespace

double topic_rating(std::span<const double> theta_column, std::span<const int> ratings) {
  if (theta_column.size() != ratings.size()) {
    throw ContractError("topic_rating: theta column and ratings differ in length");
  }
  double weighted = 0;
  double mass = 0;
  for (size_t d = 0; d < theta_column.size(); ++d) {
    weighted += theta_column[d] * ratings[d];
    mass += theta_column[d];
  }
  if (!(mass > 0)) throw UndefinedRatingError("topic_rating: all-zero theta column");
  return weighted / mass;
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("hellinger: length mismatch");
  check_distribution(p, "p");
  check_distribution(q, "q");
  double bc = 0;
  for (size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  return std::clamp(std::sqrt(std::max(0.0, 1.0 - bc)), 0.0, 1.0);
}

double representative_score(double theta_dt, int rating, double topic_rating,
                            int64_t helpful, int64_t unhelpful) {
  const double bonus = helpful - unhelpful > 0 ? 0.1 : 0.0;
  return theta_dt / (std::abs(rating - topic_rating) - bonus + 1.0);
}

ReviewId representative_review(int32_t topic, const Matrix& theta,
                               std::span<const ReviewMeta> reviews, double topic_rating) {
  if (reviews.empty()) throw ContractError("representative_review: no reviews");
  size_t best = 0;
  double best_score = -1;
  for (size_t d = 0; d < reviews.size(); ++d) {
    const auto& r = reviews[d];
    const double score = representative_score(theta(static_cast<int32_t>(d), topic), r.rating,
                                              topic_rating, r.helpful_votes,
                                              r.unhelpful_votes);
    const auto& b = reviews[best];
    if (score > best_score ||
        (score == best_score &&
         (r.timestamp < b.timestamp ||
          (r.timestamp == b.timestamp && r.review_id < b.review_id)))) {
      best = d;
      best_score = score;
    }
  }
  return reviews[best].review_id;
}

int32_t topic_similarity_percent(double distance) {
  return static_cast<int32_t>(std::lround(100.0 * (1.0 - distance)));
}

std::vector<TopicMatch> match_topics(const Matrix& phi_a, const Matrix& phi_b, bool parallel) {
  std::vector<TopicMatch> out(phi_a.rows);
  if (phi_b.rows == 0) return out;
  const Matrix dist = parallel ? kernels::parallel::pairwise_hellinger(phi_a, phi_b)
                               : kernels::serial::pairwise_hellinger(phi_a, phi_b);
  for (int32_t i = 0; i < phi_a.rows; ++i) {
    TopicMatch m{0, dist(i, 0)};
    for (int32_t j = 1; j < phi_b.rows; ++j) {
      if (dist(i, j) < m.distance) m = {j, dist(i, j)};
    }
    out[i] = m;
  }
  return out;
}

AlignedPhi align_phi(const Matrix& phi_a, std::span<const std::string> vocab_a,
                     const Matrix& phi_b, std::span<const std::string> vocab_b) {
  AlignedPhi out;
  std::unordered_map<std::string_view, int32_t> index;
  std::vector<int32_t> a_cols, b_cols;
  auto column_of = [&](const std::string& w) {
    auto [it, inserted] = index.emplace(w, static_cast<int32_t>(out.vocabulary.size()));
    if (inserted) out.vocabulary.push_back(w);
    return it->second;
  };
  // Keys view the input vocabularies, not out.vocabulary.
  for (const auto& w : vocab_a) a_cols.push_back(column_of(w));
  for (const auto& w : vocab_b) b_cols.push_back(column_of(w));
  const auto width = static_cast<int32_t>(out.vocabulary.size());

  auto scatter = [&](const Matrix& phi, const std::vector<int32_t>& cols) {
    Matrix m(phi.rows, width);
    for (int32_t t = 0; t < phi.rows; ++t) {
      double sum = 0;
      for (size_t w = 0; w < cols.size(); ++w) {
        m(t, cols[w]) = phi(t, static_cast<int32_t>(w));
        sum += phi(t, static_cast<int32_t>(w));
      }
      if (sum > 0) {
        for (int32_t c = 0; c < width; ++c) m(t, c) /= sum;
      }
    }
    return m;
  };
  out.a = scatter(phi_a, a_cols);
  out.b = scatter(phi_b, b_cols);
  return out;
}

ComparisonSummary build_comparison(const SideInput& reference, const SideInput& other,
                                   bool parallel) {
  for (const auto* side : {&reference, &other}) {
    if (side->snapshot == nullptr || side->vocabulary == nullptr) {
      throw ContractError("build_comparison: missing snapshot or vocabulary");
    }
    if (side->snapshot->theta.rows != static_cast<int32_t>(side->reviews.size())) {
      throw ContractError("build_comparison: theta rows do not match reviews");
    }
  }
  const SideTopics ref_rated = rate_topics(reference);
  const SideTopics other_rated = rate_topics(other);

  const AlignedPhi aligned =
      align_phi(reference.snapshot->phi, reference.vocabulary->words(),
                other.snapshot->phi, other.vocabulary->words());
  const Matrix ref_phi = select_rows(aligned.a, ref_rated.kept);
  const Matrix other_phi = select_rows(aligned.b, other_rated.kept);

  ComparisonSummary out;
  out.reference = summarize_side(reference, ref_rated,
                                 match_topics(ref_phi, other_phi, parallel), other_rated.kept);
  out.other = summarize_side(other, other_rated, match_topics(other_phi, ref_phi, parallel),
                             ref_rated.kept);
  out.reference_stamp = {0, reference.snapshot->iteration, reference.snapshot->log_likelihood};
  out.other_stamp = {0, other.snapshot->iteration, other.snapshot->log_likelihood};
  return out;
}

std::vector<size_t> reviews_by_topic(std::span<const ReviewSummary> reviews, int32_t topic) {
  std::vector<size_t> order(reviews.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    const double tx = reviews[x].theta.at(topic), ty = reviews[y].theta.at(topic);
    return tx != ty ? tx > ty : reviews[x].meta.review_id < reviews[y].meta.review_id;
  });
  return order;
}

}  // namespace reviewlens
