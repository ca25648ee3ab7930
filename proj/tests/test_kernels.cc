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

// The OpenMP kernels against the serial reference, and the serial reference
// against direct evaluation.

#include <doctest.h>

#include <cmath>
#include <random>

#include "reviewlens/engine.h"
#include "reviewlens/kernels.h"
#include "synthetic.h"

namespace reviewlens {
namespace {

namespace serial = kernels::serial;
namespace parallel = kernels::parallel;

TokenCorpus random_corpus(std::mt19937_64& rng, int docs, int vocab, int max_len) {
  TokenCorpus c;
  c.vocab_size = vocab;
  for (int d = 0; d < docs; ++d) {
    std::vector<int32_t> doc(rng() % (max_len + 1));
    for (auto& w : doc) w = static_cast<int32_t>(rng() % vocab);
    c.docs.push_back(std::move(doc));
  }
  c.docs[0].push_back(0);  // never all empty
  return c;
}

bool close(double a, double b, double rel = 1e-10) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Direct lgamma evaluation of the collapsed joint.
double oracle_log_likelihood(const ModelState& s) {
  const int k = s.num_topics();
  double a_sum = 0;
  for (double a : s.alpha()) a_sum += a;
  double ll = 0;
  for (int d = 0; d < s.num_docs(); ++d) {
    if (s.doc_length(d) == 0) continue;
    ll += std::lgamma(a_sum) - std::lgamma(a_sum + s.doc_length(d));
    for (int t = 0; t < k; ++t) {
      ll += std::lgamma(s.alpha()[t] + s.doc_topic(d, t)) - std::lgamma(s.alpha()[t]);
    }
  }
  const double b = s.beta();
  const double b_sum = b * s.vocab_size();
  for (int t = 0; t < k; ++t) {
    ll += std::lgamma(b_sum) - std::lgamma(b_sum + s.topic_total(t));
    for (int w = 0; w < s.vocab_size(); ++w) {
      ll += std::lgamma(b + s.word_topic(w, t)) - std::lgamma(b);
    }
  }
  return ll;
}

TEST_CASE("log likelihood closed form") {
  SUBCASE("empty corpus is zero") {
    std::vector<double> alpha{0.5, 0.5};
    std::vector<int32_t> topic_total{0, 0};
    CountView empty;
    empty.num_topics = 2;
    empty.vocab_size = 3;
    empty.topic_total = topic_total;
    std::vector<int32_t> word_topic(6, 0);
    empty.word_topic = word_topic;
    CHECK(serial::log_likelihood(empty, alpha, 0.01) == doctest::Approx(0.0));
    CHECK(parallel::log_likelihood(empty, alpha, 0.01) == doctest::Approx(0.0));
  }
  SUBCASE("one token, one topic, unit priors") {
    TokenCorpus c;
    c.vocab_size = 1;
    c.docs = {{0}};
    ModelConfig config;
    config.k = 1;
    config.alpha = 1;
    config.beta = 1;
    ModelState s(c, config);
    CHECK(std::abs(serial::log_likelihood(s.counts(), s.alpha(), s.beta())) < 1e-12);
  }
  SUBCASE("random states against lgamma oracle") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
      ModelConfig config;
      config.k = 2 + static_cast<int>(rng() % 6);
      config.seed = rng();
      ModelState s(random_corpus(rng, 12, 9, 15), config);
      std::vector<double> alpha(config.k);
      for (auto& a : alpha) a = 0.05 + (rng() % 100) / 50.0;
      s.set_hyperparameters(alpha, 0.02 + (rng() % 10) / 20.0);
      CHECK(close(serial::log_likelihood(s.counts(), s.alpha(), s.beta()),
                  oracle_log_likelihood(s)));
    }
  }
}

TEST_CASE("log likelihood is invariant to topic relabeling") {
  TokenCorpus c;
  c.vocab_size = 3;
  c.docs = {{0, 1, 1}, {2, 0}};
  ModelConfig config;
  config.k = 3;
  ModelState s(c, config);
  // Fix assignments, then the same with labels 0 and 2 swapped.
  const std::vector<std::vector<int>> z{{0, 1, 2}, {2, 2}};
  for (int d = 0; d < 2; ++d)
    for (int i = 0; i < static_cast<int>(z[d].size()); ++i) s.reassign(d, i, z[d][i]);
  const double before = log_likelihood(s);
  for (int d = 0; d < 2; ++d)
    for (int i = 0; i < static_cast<int>(z[d].size()); ++i) s.reassign(d, i, 2 - z[d][i]);
  CHECK(log_likelihood(s) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("parallel kernels match the serial reference") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    ModelConfig config;
    config.k = 2 + static_cast<int>(rng() % 12);
    config.seed = rng();
    ModelState s(random_corpus(rng, 60, 40, 30), config);
    std::vector<double> alpha(config.k);
    for (auto& a : alpha) a = 0.01 + (rng() % 100) / 40.0;
    s.set_hyperparameters(alpha, 0.01 + (rng() % 10) / 30.0);
    const CountView v = s.counts();

    CHECK(close(serial::log_likelihood(v, s.alpha(), s.beta()),
                parallel::log_likelihood(v, s.alpha(), s.beta())));

    const AlphaSums as = serial::alpha_digamma_sums(v, s.alpha());
    const AlphaSums ap = parallel::alpha_digamma_sums(v, s.alpha());
    CHECK(close(as.denominator, ap.denominator));
    for (int t = 0; t < config.k; ++t) CHECK(close(as.numerator[t], ap.numerator[t]));

    const BetaSums bs = serial::beta_digamma_sums(v, s.beta());
    const BetaSums bp = parallel::beta_digamma_sums(v, s.beta());
    CHECK(close(bs.numerator, bp.numerator));
    CHECK(close(bs.denominator, bp.denominator));

    CHECK(serial::estimate_theta(v, s.alpha()).data == parallel::estimate_theta(v, s.alpha()).data);
    CHECK(serial::estimate_phi(v, s.beta()).data == parallel::estimate_phi(v, s.beta()).data);

    const Matrix phi = serial::estimate_phi(v, s.beta());
    const Matrix hs = serial::pairwise_hellinger(phi, phi);
    const Matrix hp = parallel::pairwise_hellinger(phi, phi);
    for (size_t i = 0; i < hs.data.size(); ++i) CHECK(close(hs.data[i], hp.data[i], 1e-12));
  }
}

TEST_CASE("theta and phi rows are distributions") {
  std::mt19937_64 rng(5);
  ModelConfig config;
  config.k = 7;
  TokenCorpus c = random_corpus(rng, 30, 25, 20);
  c.docs.push_back({});
  ModelState s(c, config);
  const Matrix theta = serial::estimate_theta(s.counts(), s.alpha());
  for (int d = 0; d < theta.rows; ++d) {
    double sum = 0;
    for (double x : theta.row(d)) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double x : theta.row(theta.rows - 1)) CHECK(x == doctest::Approx(1.0 / 7));
  const Matrix phi = serial::estimate_phi(s.counts(), s.beta());
  for (int t = 0; t < phi.rows; ++t) {
    double sum = 0;
    for (double x : phi.row(t)) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pairwise hellinger matches brute force") {
  Matrix a(2, 3), b(3, 3);
  a.data = {1, 0, 0, 0.5, 0.5, 0};
  b.data = {0.5, 0.5, 0, 0, 0, 1, 1, 0, 0};
  const Matrix h = serial::pairwise_hellinger(a, b);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      double bc = 0;
      for (int w = 0; w < 3; ++w) bc += std::sqrt(a(i, w) * b(j, w));
      CHECK(h(i, j) == doctest::Approx(std::sqrt(std::max(0.0, 1 - bc))).epsilon(1e-12));
    }
  }
  CHECK(h(0, 2) == doctest::Approx(0.0));
  CHECK(h(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("parallel preprocessing matches serial and keeps order") {
  const auto reviews = testing::synthetic_reviews("P", "Synthetic Widget", 300, 21);
  const auto names = product_name_words("Synthetic Widget");
  const auto s = serial::preprocess_batch(reviews, names);
  const auto p = parallel::preprocess_batch(reviews, names);
  REQUIRE(s.size() == reviews.size());
  REQUIRE(p.size() == reviews.size());
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].review_id == review_id_of(reviews[i]));
    CHECK(s[i].review_id == p[i].review_id);
    CHECK(s[i].tokens == p[i].tokens);
    CHECK(s[i].config_version == p[i].config_version);
  }
}

}  // namespace
}  // namespace reviewlens
