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

// Command line front end: ingest, dump, compare, serve.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "reviewlens/config.h"
#include "reviewlens/errors.h"
#include "reviewlens/json_io.h"
#include "reviewlens/service.h"
#include "reviewlens/store.h"

namespace {

using namespace reviewlens;

constexpr size_t kIngestBatch = 4096;

int do_ingest(Store& store, const std::string& file, size_t limit) {
  std::ifstream in(file);
  if (!in) throw NotFoundError("cannot open " + file);
  std::vector<RawReview> batch;
  size_t added = 0;
  auto flush = [&] {
    added += store.add_reviews(batch);
    batch.clear();
  };
  const SnapStats stats = read_snap_stream(
      in,
      [&](RawReview&& r) {
        batch.push_back(std::move(r));
        if (batch.size() >= kIngestBatch) flush();
      },
      limit);
  flush();
  std::cout << "parsed " << stats.parsed << " rejected " << stats.rejected << " added " << added
            << "\n";
  return 0;
}

int do_dump(Store& store, const std::string& product_id) {
  const ProductRecord record = store.product(product_id);
  for (const ReviewId id : record.review_ids) {
    std::cout << nlohmann::json(store.fetch_review(id)).dump() << "\n";
  }
  return 0;
}

int do_compare(Dispatcher& dispatcher, const CompareRequest& request, const std::string& out) {
  std::chrono::duration<double> first{0};
  const auto start = std::chrono::steady_clock::now();
  const ComparisonSummary summary = compare_headless(dispatcher, request, &first);
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - start;
  const std::string body = nlohmann::json(summary).dump(2);
  if (out.empty() || out == "-") {
    std::cout << body << "\n";
  } else {
    std::ofstream(out) << body << "\n";
  }
  std::cerr << "first summary after " << first.count() << " s, final after " << total.count()
            << " s, " << summary.version << " versions\n";
  return 0;
}

std::atomic<bool> g_interrupted{false};

int do_serve(Dispatcher& dispatcher, const std::string& host, int port) {
  dispatcher.start_background_workers();
  HttpServer server(dispatcher);
  const int bound = server.start(host, port);
  std::cerr << "listening on " << host << ":" << bound << "\n";
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReviewLens: compare products through the topics of their reviews"};
  app.require_subcommand(1);

  std::string config_path;
  std::string store_path;
  std::optional<uint64_t> seed;
  std::optional<int32_t> k;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--store", store_path, "review store (overrides the config file)");
  app.add_option("--seed", seed, "base random seed (overrides the config file)");
  app.add_option("-k,--topics", k, "number of topics (overrides the config file)");

  auto* ingest = app.add_subcommand("ingest", "load a SNAP review dump into the store");
  std::string file;
  size_t limit = 0;
  ingest->add_option("--file", file)->required()->check(CLI::ExistingFile);
  ingest->add_option("--limit", limit, "stop after this many parsed records");

  auto* dump = app.add_subcommand("dump", "print a product's reviews as JSON lines");
  std::string product;
  dump->add_option("--product", product)->required();

  auto* compare = app.add_subcommand("compare", "run one comparison without HTTP");
  CompareRequest request;
  std::string out;
  compare->add_option("--ref", request.reference)->required();
  compare->add_option("--other", request.other)->required();
  compare->add_option("--out", out, "output file, - for stdout");

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  CLI11_PARSE(app, argc, argv);

  try {
    ServiceConfig config = config_path.empty() ? default_config() : load_config(config_path);
    if (!store_path.empty()) config.store_path = store_path;
    if (seed) config.model.seed = *seed;
    if (k) config.model.k = *k;
    config.model.validate();

    auto store = Store::open(config.store_path);
    if (*ingest) return do_ingest(*store, file, limit);
    if (*dump) return do_dump(*store, product);

    Dispatcher dispatcher(*store, config);
    if (*compare) return do_compare(dispatcher, request, out);
    if (*serve) return do_serve(dispatcher, host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
