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

#include "reviewlens/config.h"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>

#include "reviewlens/errors.h"

namespace reviewlens {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

ServiceConfig default_config() {
  ServiceConfig config;
#ifdef REVIEWLENS_DATA_DIR
  const std::string dir = REVIEWLENS_DATA_DIR "/stopwords/";
  config.stopword_files = {dir + "english.txt", dir + "amazon.txt"};
#endif
  return config;
}

ServiceConfig parse_config(std::istream& in, const std::string& base_dir) {
  ServiceConfig config = default_config();
  ModelConfig& m = config.model;

  CLI::App app{"reviewlens configuration"};
  app.allow_config_extras(false);
  std::vector<std::string> stopwords;
  std::string emission = "wallclock";
  std::string sampler = "sparse";

  app.add_option("--store", config.store_path);
  app.add_option("--static_dir", config.static_dir);
  app.add_option("--stopwords", stopwords);
  app.add_option("--ensemble_size", config.ensemble_size)->check(CLI::PositiveNumber);
  app.add_option("--background_workers", config.background_workers);
  app.add_option("--k", m.k)->check(CLI::Range(2, 100000));
  app.add_option("--alpha", m.alpha)->check(CLI::PositiveNumber);
  app.add_option("--beta", m.beta)->check(CLI::PositiveNumber);
  app.add_option("--max_iterations", m.max_iterations);
  app.add_option("--burn_in", m.burn_in);
  app.add_option("--hyperopt_interval", m.hyperopt_interval);
  app.add_option("--first_emit", m.first_emit);
  app.add_option("--emission_mode", emission)
      ->check(CLI::IsMember({"wallclock", "iterations"}));
  app.add_option("--emit_interval_iterations", m.emit_interval_iterations);
  app.add_option("--emit_interval_seconds", m.emit_interval_seconds);
  app.add_option("--convergence_window", m.convergence_window);
  app.add_option("--convergence_tolerance", m.convergence_tolerance);
  app.add_option("--likelihood_interval", m.likelihood_interval);
  app.add_option("--seed", m.seed);
  app.add_option("--sampler", sampler)->check(CLI::IsMember({"sparse", "dense"}));
  app.add_option("--parallel_kernels", m.parallel_kernels);

  try {
    app.parse_from_stream(in);
  } catch (const CLI::Error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  config.store_path = resolve(base_dir, config.store_path);
  config.static_dir = resolve(base_dir, config.static_dir);
  if (app.count("--stopwords") > 0) {
    config.stopword_files.clear();
    for (const auto& p : stopwords) config.stopword_files.push_back(resolve(base_dir, p));
  }
  m.emission_mode = emission == "iterations" ? EmissionMode::kIterations : EmissionMode::kWallClock;
  m.sampler = sampler == "dense" ? SamplerPath::kDense : SamplerPath::kSparse;
  try {
    m.validate();
  } catch (const ContractError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config;
}

ServiceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config file " + path);
  return parse_config(in, fs::path(path).parent_path().string());
}

}  // namespace reviewlens
