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

#include <random>
#include <set>

#include "reviewlens/ensemble.h"
#include "reviewlens/errors.h"
#include "synthetic.h"

namespace reviewlens {
namespace {

Emission fake(int32_t iteration, double ll) {
  auto s = std::make_shared<ModelSnapshot>();
  s->iteration = iteration;
  s->log_likelihood = ll;
  return Emission{s};
}

std::vector<std::optional<Emission>> pool_of(std::initializer_list<double> lls) {
  std::vector<std::optional<Emission>> pool;
  for (double ll : lls) pool.emplace_back(fake(10, ll));
  return pool;
}

TokenCorpus small_corpus() {
  const std::vector<std::vector<double>> phi{{0.4, 0.4, 0.1, 0.1, 0, 0}, {0, 0, 0.1, 0.1, 0.4, 0.4}};
  return testing::generate_lda(phi, {0.5, 0.5}, 40, 20, 12);
}

ModelConfig fast_config() {
  ModelConfig c;
  c.k = 2;
  c.max_iterations = 60;
  c.emission_mode = EmissionMode::kIterations;
  c.emit_interval_iterations = 5;
  c.convergence_window = 0;
  c.hyperopt_interval = 0;
  return c;
}

TEST_CASE("select best") {
  CHECK(select_best(pool_of({-105.2, -98.7, -101.0})).instance == 1);
  CHECK(select_best(pool_of({-100.0, -100.0})).instance == 0);
  CHECK_THROWS_AS(select_best(std::vector<std::optional<Emission>>{}), NotReadyError);
  CHECK_THROWS_AS(select_best(std::vector<std::optional<Emission>>(3)), NotReadyError);

  std::vector<std::optional<Emission>> sparse(3);
  sparse[2] = fake(10, -5);
  CHECK(select_best(sparse).instance == 2);
}

TEST_CASE("select best equals brute force on random pools") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const size_t m = 1 + rng() % 8;
    std::vector<std::optional<Emission>> pool(m);
    for (size_t i = 0; i < m; ++i) {
      if (i > 0 && rng() % 4 == 0) continue;
      pool[i] = fake(10, -static_cast<double>(rng() % 5));  // ties are common
    }
    size_t expected = m;
    for (size_t i = 0; i < m; ++i) {
      if (pool[i] && (expected == m || pool[i]->log_likelihood() > pool[expected]->log_likelihood())) {
        expected = i;
      }
    }
    CHECK(select_best(pool).instance == expected);
  }
}

TEST_CASE("update pool keeps the newest emission per instance") {
  UpdatePool pool(2);
  CHECK(pool.offer(0, fake(10, -50)));
  CHECK(pool.offer(0, fake(15, -60)));
  CHECK_FALSE(pool.offer(0, fake(12, -1)));
  CHECK(pool.view()[0]->iteration() == 15);
  CHECK_FALSE(pool.view()[1].has_value());
}

TEST_CASE("derived seeds are distinct and reproducible") {
  const auto a = derive_seeds(1, 64);
  CHECK(std::set<uint64_t>(a.begin(), a.end()).size() == 64);
  CHECK(derive_seeds(1, 64) == a);
  CHECK(derive_seeds(2, 4) != derive_seeds(1, 4));
}

TEST_CASE("single instance ensemble") {
  auto job = EnsembleJob::start("j", small_corpus(), fast_config(), 1);
  job->wait();
  CHECK(job->status() == JobStatus::kDone);
  const auto result = job->poll(std::nullopt);
  REQUIRE(result);
  CHECK(result->stamp.instance == 0);
  CHECK(result->stamp.done);
  CHECK(result->best.snapshot->iteration == 60);
}

TEST_CASE("four instances produce distinct streams") {
  auto job = EnsembleJob::start("j", small_corpus(), fast_config(), 4);
  job->wait();
  CHECK(job->status() == JobStatus::kDone);
  const auto view = job->pool().view();
  REQUIRE(view.size() == 4);
  std::set<std::vector<double>> thetas;
  for (const auto& e : view) {
    REQUIRE(e);
    CHECK(e->iteration() == 60);
    thetas.insert(e->snapshot->theta.data);
  }
  CHECK(thetas.size() == 4);

  // The done-flagged result is select_best over the final emissions.
  const auto result = job->poll(std::nullopt);
  REQUIRE(result);
  CHECK(result->stamp.done);
  CHECK(result->best.instance == select_best(view).instance);
  CHECK(result->best.snapshot == select_best(view).snapshot);
  CHECK_FALSE(job->poll(result->stamp));
}

TEST_CASE("polling reports each change once") {
  ModelConfig config = fast_config();
  config.max_iterations = 400;
  auto job = EnsembleJob::start("j", small_corpus(), config, 3);
  std::optional<PollStamp> since;
  std::vector<PollStamp> seen;
  uint64_t updates = 0;
  while (true) {
    updates = job->wait_for_update(updates, std::chrono::milliseconds(50));
    if (auto r = job->poll(since)) {
      CHECK_FALSE(since == r->stamp);
      // The selected snapshot is the running max over latest-per-instance.
      since = r->stamp;
      seen.push_back(r->stamp);
      if (r->stamp.done) break;
    }
  }
  CHECK(seen.back().done);
  CHECK_FALSE(job->poll(since));
}

TEST_CASE("empty corpus fails immediately") {
  TokenCorpus empty;
  empty.vocab_size = 0;
  empty.docs = {{}};
  auto job = EnsembleJob::start("j", empty, fast_config(), 4);
  CHECK(job->status() == JobStatus::kFailed);
  CHECK_FALSE(job->error().empty());
  CHECK_FALSE(job->poll(std::nullopt));
  job->wait();
}

TEST_CASE("cancel stops the samplers") {
  ModelConfig config = fast_config();
  config.max_iterations = 10000000;
  auto job = EnsembleJob::start("j", small_corpus(), config, 2);
  job->wait_for_update(0, std::chrono::milliseconds(2000));
  job->cancel();
  job->wait();
  CHECK(job->status() != JobStatus::kRunning);
}

}  // namespace
}  // namespace reviewlens
