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

// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "reviewlens/engine.h"
#include "reviewlens/kernels.h"
#include "../tests/synthetic.h"

namespace reviewlens {
namespace {

// A sampled state over a corpus shaped like one product's reviews.
struct Fixture {
  explicit Fixture(int docs) {
    std::mt19937_64 rng(1);
    std::vector<std::vector<double>> phi(10, std::vector<double>(2000));
    for (auto& row : phi) row = testing::sample_dirichlet(rng, std::vector<double>(2000, 0.05));
    const TokenCorpus corpus = testing::generate_lda(phi, std::vector<double>(10, 0.3), docs, 40, 2);
    ModelConfig config;
    config.k = 10;
    state = std::make_unique<ModelState>(corpus, config);
    for (int i = 0; i < 5; ++i) sweep(*state);
    phi_matrix = kernels::serial::estimate_phi(state->counts(), state->beta());
  }
  std::unique_ptr<ModelState> state;
  Matrix phi_matrix;
};

Fixture& fixture(int docs) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[docs];
  if (!f) f = std::make_unique<Fixture>(docs);
  return *f;
}

template <double (*Fn)(const CountView&, std::span<const double>, double)>
void BM_LogLikelihood(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f.state->counts(), f.state->alpha(), f.state->beta()));
}
BENCHMARK(BM_LogLikelihood<kernels::serial::log_likelihood>)->Name("log_likelihood/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_LogLikelihood<kernels::parallel::log_likelihood>)->Name("log_likelihood/omp")->Arg(1000)->Arg(10000);

template <AlphaSums (*Fn)(const CountView&, std::span<const double>)>
void BM_AlphaSums(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f.state->counts(), f.state->alpha()));
}
BENCHMARK(BM_AlphaSums<kernels::serial::alpha_digamma_sums>)->Name("alpha_digamma_sums/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_AlphaSums<kernels::parallel::alpha_digamma_sums>)->Name("alpha_digamma_sums/omp")->Arg(1000)->Arg(10000);

template <BetaSums (*Fn)(const CountView&, double)>
void BM_BetaSums(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f.state->counts(), f.state->beta()));
}
BENCHMARK(BM_BetaSums<kernels::serial::beta_digamma_sums>)->Name("beta_digamma_sums/serial")->Arg(1000);
BENCHMARK(BM_BetaSums<kernels::parallel::beta_digamma_sums>)->Name("beta_digamma_sums/omp")->Arg(1000);

template <Matrix (*Fn)(const CountView&, std::span<const double>)>
void BM_Theta(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f.state->counts(), f.state->alpha()));
}
BENCHMARK(BM_Theta<kernels::serial::estimate_theta>)->Name("estimate_theta/serial")->Arg(10000);
BENCHMARK(BM_Theta<kernels::parallel::estimate_theta>)->Name("estimate_theta/omp")->Arg(10000);

template <Matrix (*Fn)(const Matrix&, const Matrix&)>
void BM_Hellinger(benchmark::State& st) {
  auto& f = fixture(1000);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(f.phi_matrix, f.phi_matrix));
}
BENCHMARK(BM_Hellinger<kernels::serial::pairwise_hellinger>)->Name("pairwise_hellinger/serial");
BENCHMARK(BM_Hellinger<kernels::parallel::pairwise_hellinger>)->Name("pairwise_hellinger/omp");

template <std::vector<PreprocessedReview> (*Fn)(std::span<const RawReview>,
                                                const std::unordered_set<std::string>&)>
void BM_Preprocess(benchmark::State& st) {
  static const auto reviews = testing::synthetic_reviews("P", "Bench Product", 2000, 3, 0, 10, 80);
  static const auto names = product_name_words("Bench Product");
  for (auto _ : st) benchmark::DoNotOptimize(Fn(reviews, names));
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(reviews.size()));
}
BENCHMARK(BM_Preprocess<kernels::serial::preprocess_batch>)->Name("preprocess_batch/serial");
BENCHMARK(BM_Preprocess<kernels::parallel::preprocess_batch>)->Name("preprocess_batch/omp");

}  // namespace
}  // namespace reviewlens

BENCHMARK_MAIN();
