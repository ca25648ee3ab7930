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

#include <doctest.h>

#include <cmath>
#include <random>

#include "reviewlens/engine.h"
#include "reviewlens/errors.h"
#include "reviewlens/summarize.h"
#include "synthetic.h"

namespace reviewlens {
namespace {

ReviewMeta meta(uint64_t id, int rating, int64_t helpful = 0, int64_t unhelpful = 0,
                int64_t time = 0) {
  ReviewMeta m;
  m.review_id = ReviewId{id};
  m.rating = rating;
  m.helpful_votes = helpful;
  m.unhelpful_votes = unhelpful;
  m.timestamp = time;
  return m;
}

TEST_CASE("topic rating") {
  const std::vector<int> fives{5, 5, 5};
  CHECK(topic_rating(std::vector<double>{0.1, 0.7, 0.2}, fives) == doctest::Approx(5.0));
  CHECK(std::abs(topic_rating(std::vector<double>{0.8, 0.2}, std::vector<int>{5, 1}) - 4.2) < 1e-9);
  CHECK(topic_rating(std::vector<double>{0.3}, std::vector<int>{2}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(topic_rating(std::vector<double>{0, 0}, std::vector<int>{1, 2}),
                  UndefinedRatingError);
}

TEST_CASE("hellinger") {
  const std::vector<double> p{1, 0}, q{0.5, 0.5};
  CHECK(std::abs(hellinger(p, q) - std::sqrt(1 - std::sqrt(0.5))) < 1e-9);
  CHECK(hellinger(p, q) == doctest::Approx(0.54120).epsilon(1e-5));
  CHECK(hellinger(q, q) == doctest::Approx(0.0));
  CHECK(hellinger(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(hellinger(std::vector<double>{0.5, 0.4}, q), ContractError);
  CHECK_THROWS_AS(hellinger(std::vector<double>{1.5, -0.5}, q), ContractError);
  CHECK_THROWS_AS(hellinger(std::vector<double>{1}, q), ContractError);

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = testing::sample_dirichlet(rng, std::vector<double>(8, 0.3));
    const auto b = testing::sample_dirichlet(rng, std::vector<double>(8, 0.3));
    const double h = hellinger(a, b);
    CHECK(h >= 0);
    CHECK(h <= 1);
    CHECK(h == doctest::Approx(hellinger(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("representative score") {
  CHECK(std::abs(representative_score(0.5, 4, 4.0, 3, 1) - 0.5 / 0.9) < 1e-9);
  CHECK(representative_score(0.0, 4, 4.0, 3, 1) == 0.0);
  CHECK(representative_score(0.5, 4, 4.0, 1, 1) == doctest::Approx(0.5));
  CHECK(representative_score(0.5, 2, 4.0, 0, 0) == doctest::Approx(0.5 / 3));
}

TEST_CASE("representative review") {
  Matrix theta(3, 1);
  SUBCASE("net-positive votes win a tie in theta") {
    theta.data = {0.4, 0.4, 0.2};
    const std::vector<ReviewMeta> reviews{meta(1, 4, 0, 0), meta(2, 4, 2, 0), meta(3, 4, 0, 0)};
    CHECK(representative_review(0, theta, reviews, 4.0) == ReviewId{2});
  }
  SUBCASE("zero theta is never chosen") {
    theta.data = {0.0, 0.01, 0.0};
    const std::vector<ReviewMeta> reviews{meta(1, 4, 9, 0), meta(2, 1), meta(3, 4, 9, 0)};
    CHECK(representative_review(0, theta, reviews, 4.0) == ReviewId{2});
  }
  SUBCASE("ties go to the earliest, then the smaller id") {
    theta.data = {0.3, 0.3, 0.3};
    const std::vector<ReviewMeta> reviews{meta(9, 3, 0, 0, 50), meta(7, 3, 0, 0, 20),
                                          meta(5, 3, 0, 0, 20)};
    CHECK(representative_review(0, theta, reviews, 3.0) == ReviewId{5});
  }
}

TEST_CASE("similarity percent") {
  CHECK(topic_similarity_percent(0.0) == 100);
  CHECK(topic_similarity_percent(1.0) == 0);
  CHECK(topic_similarity_percent(0.63) == 37);
  CHECK(topic_similarity_percent(0.554) == 45);
}

TEST_CASE("topic matching") {
  Matrix a(2, 3), b(2, 3);
  a.data = {0.7, 0.2, 0.1, 0.1, 0.1, 0.8};
  b.data = {0.0, 0.5, 0.5, 0.6, 0.4, 0.0};
  const auto m = match_topics(a, b);
  for (int i = 0; i < 2; ++i) {
    double best = 2;
    int arg = -1;
    for (int j = 0; j < 2; ++j) {
      const double d = hellinger(a.row(i), b.row(j));
      if (d < best) best = d, arg = j;
    }
    CHECK(m[i].topic == arg);
    CHECK(std::abs(m[i].distance - best) < 1e-12);
  }
  CHECK(match_topics(a, a)[1].topic == 1);
  CHECK(match_topics(a, a)[1].distance == doctest::Approx(0.0));

  Matrix c(1, 4), d(3, 4);
  c.data = {0.5, 0.5, 0, 0};
  d.data = {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0.5, 0.5};
  CHECK(match_topics(c, d)[0].topic == 0);
  CHECK(match_topics(c, d)[0].distance == doctest::Approx(1.0));
}

TEST_CASE("phi alignment over the union vocabulary") {
  Matrix a(1, 2), b(1, 2);
  a.data = {0.25, 0.75};
  b.data = {0.5, 0.5};
  const std::vector<std::string> va{"red", "blue"}, vb{"blue", "green"};
  const AlignedPhi aligned = align_phi(a, va, b, vb);
  CHECK(aligned.vocabulary == std::vector<std::string>{"red", "blue", "green"});
  CHECK(aligned.a.data == std::vector<double>{0.25, 0.75, 0});
  CHECK(aligned.b.data == std::vector<double>{0, 0.5, 0.5});
}

TEST_CASE("reviews by topic") {
  std::vector<ReviewSummary> reviews(4);
  const double t[4][2] = {{0.1, 0.9}, {0.95, 0.05}, {0.5, 0.5}, {0.5, 0.5}};
  for (int i = 0; i < 4; ++i) {
    reviews[i].meta = meta(10 - i, 3);
    reviews[i].theta = {t[i][0], t[i][1]};
  }
  CHECK(reviews_by_topic(reviews, 0) == std::vector<size_t>{1, 3, 2, 0});
  CHECK(reviews_by_topic(reviews, 1) == std::vector<size_t>{0, 3, 2, 1});
}

struct Side {
  ProductCorpus corpus;
  std::vector<ReviewMeta> metas;
  std::shared_ptr<const ModelSnapshot> snapshot;
};

Side model_side(const std::string& id, int offset, uint64_t seed) {
  Side s;
  const auto raw = testing::synthetic_reviews(id, "", 120, seed, offset);
  s.corpus = build_corpus(raw, StopWordList{}, "");
  for (const auto& r : s.corpus.reviews) s.metas.push_back(r.meta);
  ModelConfig config;
  config.k = 6;
  config.max_iterations = 100;
  config.emission_mode = EmissionMode::kIterations;
  config.seed = seed;
  s.snapshot = run(token_corpus_of(s.corpus), config, nullptr);
  return s;
}

TEST_CASE("comparison summary invariants") {
  const Side ref = model_side("A", 0, 1);
  const Side other = model_side("B", 3, 2);
  const SideInput a{"A", "Title A", ref.snapshot.get(), &ref.corpus.vocabulary, ref.metas};
  const SideInput b{"B", "Title B", other.snapshot.get(), &other.corpus.vocabulary, other.metas};
  const ComparisonSummary summary = build_comparison(a, b);

  CHECK(summary.reference.product_id == "A");
  CHECK(summary.other.title == "Title B");
  CHECK(summary.reference_stamp.iteration == 100);

  std::vector<std::string> va, vb;
  for (int w = 0; w < ref.corpus.vocabulary.size(); ++w) va.push_back(ref.corpus.vocabulary.word(w));
  for (int w = 0; w < other.corpus.vocabulary.size(); ++w) vb.push_back(other.corpus.vocabulary.word(w));
  const AlignedPhi aligned = align_phi(ref.snapshot->phi, va, other.snapshot->phi, vb);

  for (const ProductSummary* side : {&summary.reference, &summary.other}) {
    const bool is_ref = side == &summary.reference;
    const Side& model = is_ref ? ref : other;
    CHECK(side->num_topics == 6);
    CHECK(side->reviews.size() == model.metas.size());
    double total = 0;
    for (size_t i = 0; i < side->topics.size(); ++i) {
      const TopicSummary& t = side->topics[i];
      total += t.probability;
      if (i > 0) CHECK(side->topics[i - 1].probability >= t.probability);
      CHECK(t.rating >= 1);
      CHECK(t.rating <= 5);
      CHECK(t.lemmas.size() <= static_cast<size_t>(kMaxLemmas));
      for (size_t j = 1; j < t.lemmas.size(); ++j) CHECK(t.lemmas[j - 1].weight >= t.lemmas[j].weight);
      for (const auto& l : t.lemmas) {
        const int32_t w = *model.corpus.vocabulary.find(l.word);
        CHECK(l.count == model.snapshot->word_count(t.topic, w));
        CHECK(l.weight == doctest::Approx(model.snapshot->phi(t.topic, w)));
      }
      CHECK(t.similarity_percent == topic_similarity_percent(t.nearest_distance));
      CHECK(t.top_reviews.size() <= static_cast<size_t>(kTopReviewsPerTopic));

      // Nearest topic by brute force over the aligned rows.
      const Matrix& mine = is_ref ? aligned.a : aligned.b;
      const Matrix& theirs = is_ref ? aligned.b : aligned.a;
      double best = 2;
      for (int j = 0; j < theirs.rows; ++j) best = std::min(best, hellinger(mine.row(t.topic), theirs.row(j)));
      CHECK(std::abs(t.nearest_distance - best) < 1e-9);

      // Representative review maximizes the score.
      std::vector<int> ratings;
      std::vector<double> column;
      for (size_t d = 0; d < model.metas.size(); ++d) {
        ratings.push_back(model.metas[d].rating);
        column.push_back(model.snapshot->theta(int32_t(d), t.topic));
      }
      CHECK(t.rating == doctest::Approx(topic_rating(column, ratings)));
      double top = -1;
      for (size_t d = 0; d < model.metas.size(); ++d) {
        top = std::max(top, representative_score(column[d], ratings[d], t.rating,
                                                 model.metas[d].helpful_votes,
                                                 model.metas[d].unhelpful_votes));
      }
      for (size_t d = 0; d < model.metas.size(); ++d) {
        if (model.metas[d].review_id == t.representative_review) {
          CHECK(representative_score(column[d], ratings[d], t.rating, model.metas[d].helpful_votes,
                                     model.metas[d].unhelpful_votes) == doctest::Approx(top));
        }
      }
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

}  // namespace
}  // namespace reviewlens
