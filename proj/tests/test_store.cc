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

#include <atomic>
#include <filesystem>
#include <thread>
#include <unistd.h>

#include "reviewlens/errors.h"
#include "reviewlens/store.h"
#include "synthetic.h"

namespace reviewlens {
namespace {

constexpr uint64_t kVersion = 7;

std::vector<ReviewId> ids_of(const std::vector<RawReview>& reviews) {
  std::vector<ReviewId> out;
  for (const auto& r : reviews) out.push_back(review_id_of(r));
  return out;
}

PreprocessedReview processed_of(const RawReview& r, uint64_t version = kVersion) {
  PreprocessedReview p = preprocess(r, {});
  p.config_version = version;
  return p;
}

std::unique_ptr<Store> store_with(const std::vector<RawReview>& reviews) {
  auto store = Store::open("");
  store->add_reviews(reviews);
  return store;
}

TEST_CASE("lookup splits hits and misses") {
  const auto reviews = testing::synthetic_reviews("P", "Thing", 10, 1);
  auto store = store_with(reviews);

  SUBCASE("nothing cached") {
    const LookupResult r = store->lookup("P", kVersion);
    CHECK(r.hits.empty());
    CHECK(r.misses.size() == 10);
    CHECK(std::count(r.claimed.begin(), r.claimed.end(), true) == 10);
  }
  SUBCASE("six cached") {
    for (int i = 0; i < 6; ++i) store->commit(processed_of(reviews[i]));
    const LookupResult r = store->lookup("P", kVersion);
    CHECK(r.hits.size() == 6);
    CHECK(r.misses.size() == 4);
    for (const auto& m : r.misses) CHECK(store->state(review_id_of(m)) == ProcessingState::kInFlight);

    // A second lookup sees the same misses but does not claim them.
    const LookupResult again = store->lookup("P", kVersion);
    CHECK(again.misses.size() == 4);
    CHECK(std::count(again.claimed.begin(), again.claimed.end(), true) == 0);
  }
  SUBCASE("fully cached") {
    for (const auto& r : reviews) store->commit(processed_of(r));
    const LookupResult r = store->lookup("P", kVersion);
    CHECK(r.hits.size() == 10);
    CHECK(r.misses.empty());
  }
  SUBCASE("stale versions are misses") {
    for (const auto& r : reviews) store->commit(processed_of(r, kVersion + 1));
    CHECK(store->lookup("P", kVersion).misses.size() == 10);
  }
  SUBCASE("unknown product") {
    CHECK_THROWS_AS(store->lookup("nope", kVersion), NotFoundError);
  }
}

TEST_CASE("scheduling deduplicates and upgrades") {
  const auto reviews = testing::synthetic_reviews("P", "Thing", 3, 2);
  auto store = store_with(reviews);
  const auto ids = ids_of(reviews);
  const std::vector<ReviewId> r12{ids[0], ids[1]};

  CHECK(store->schedule(r12, Priority::kOnDemand) == 2);
  CHECK(store->schedule(r12, Priority::kOnDemand) == 0);
  CHECK(store->schedule({}, Priority::kBackground) == 0);
  CHECK(store->live_tickets() == 2);

  const std::vector<ReviewId> r3{ids[2]};
  CHECK(store->schedule(r3, Priority::kBackground) == 1);
  CHECK(store->schedule(r3, Priority::kOnDemand) == 0);
  CHECK(store->live_tickets() == 3);

  // On-demand first, in order, then nothing.
  std::vector<ReviewId> taken;
  while (auto t = store->take_ticket()) {
    CHECK(t->priority == Priority::kOnDemand);
    CHECK(store->state(t->review_id) == ProcessingState::kInFlight);
    taken.push_back(t->review_id);
  }
  CHECK(taken == std::vector<ReviewId>{ids[0], ids[1], ids[2]});
  CHECK(store->live_tickets() == 0);
  CHECK(store->schedule(r12, Priority::kOnDemand) == 0);  // in flight
}

TEST_CASE("background tickets run after on-demand ones") {
  const auto reviews = testing::synthetic_reviews("P", "Thing", 3, 3);
  auto store = store_with(reviews);
  const auto ids = ids_of(reviews);
  store->schedule(std::vector<ReviewId>{ids[0], ids[1]}, Priority::kBackground);
  store->schedule(std::vector<ReviewId>{ids[2]}, Priority::kOnDemand);
  CHECK(store->take_ticket()->review_id == ids[2]);
  CHECK(store->take_ticket()->review_id == ids[0]);
  CHECK(store->take_ticket()->review_id == ids[1]);
  CHECK_FALSE(store->take_ticket());
}

TEST_CASE("a lookup claim retires queued tickets") {
  const auto reviews = testing::synthetic_reviews("P", "Thing", 4, 4);
  auto store = store_with(reviews);
  store->schedule(ids_of(reviews), Priority::kBackground);
  store->lookup("P", kVersion);
  CHECK_FALSE(store->take_ticket());
}

TEST_CASE("commit semantics") {
  const auto reviews = testing::synthetic_reviews("P", "Thing", 2, 5);
  auto store = store_with(reviews);
  const ReviewId id = review_id_of(reviews[0]);
  store->lookup("P", kVersion);
  store->commit(processed_of(reviews[0]));
  CHECK(store->state(id) == ProcessingState::kDone);
  store->commit(processed_of(reviews[0]));
  CHECK(store->commit_count(id) == 1);

  PreprocessedReview different = processed_of(reviews[0]);
  different.tokens.push_back("extra");
  CHECK_THROWS_AS(store->commit(different), IntegrityError);
  CHECK(store->processed(id)->tokens == processed_of(reviews[0]).tokens);

  // A failing batch writes nothing.
  const std::vector<PreprocessedReview> batch{processed_of(reviews[1]), different};
  CHECK_THROWS_AS(store->commit_batch(batch), IntegrityError);
  CHECK(store->state(review_id_of(reviews[1])) == ProcessingState::kInFlight);

  store->release(review_id_of(reviews[1]));
  CHECK(store->state(review_id_of(reviews[1])) == ProcessingState::kUnprocessed);
}

TEST_CASE("review text fetch") {
  auto reviews = testing::synthetic_reviews("P", "Thing", 2, 6);
  reviews[1].text = "";
  auto store = store_with(reviews);
  CHECK(store->fetch_review_text(review_id_of(reviews[0])) == reviews[0].text);
  CHECK(store->fetch_review_text(review_id_of(reviews[1])).empty());
  CHECK(store->fetch_review(review_id_of(reviews[0])) == reviews[0]);
  CHECK_THROWS_AS(store->fetch_review_text(ReviewId{12345}), NotFoundError);
}

TEST_CASE("product search") {
  auto store = Store::open("");
  store->add_reviews(testing::synthetic_reviews("A", "Canon PowerShot Camera", 5, 1));
  store->add_reviews(testing::synthetic_reviews("B", "Macally Power Adapter", 9, 2));
  store->add_reviews(testing::synthetic_reviews("C", "Garden Hose", 2, 3));
  CHECK(store->add_reviews(testing::synthetic_reviews("C", "Garden Hose", 2, 3)) == 0);

  const auto power = store->search("POWER");
  REQUIRE(power.size() == 2);
  CHECK(power[0].product_id == "B");
  CHECK(power[0].review_count == 9);
  CHECK(power[1].product_id == "A");
  CHECK(store->search("hose").size() == 1);
  CHECK(store->search("").size() == 3);
  CHECK(store->search("zzz").empty());
  CHECK(store->search("", 2).size() == 2);
}

TEST_CASE("concurrent claimers process each review once") {
  auto reviews = testing::synthetic_reviews("A", "Alpha", 200, 1);
  const auto b = testing::synthetic_reviews("B", "Beta", 200, 2);
  reviews.insert(reviews.end(), b.begin(), b.end());
  auto store = store_with(reviews);
  store->schedule(ids_of(reviews), Priority::kBackground);

  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      if (i % 3 == 0) {
        while (auto t = store->take_ticket()) store->commit(processed_of(store->fetch_review(t->review_id)));
        return;
      }
      const std::string product = i % 2 ? "A" : "B";
      while (true) {
        const LookupResult r = store->lookup(product, kVersion);
        if (r.misses.empty()) return;
        std::vector<ReviewId> pending;
        for (size_t j = 0; j < r.misses.size(); ++j) {
          if (r.claimed[j]) {
            store->commit(processed_of(r.misses[j]));
          } else {
            pending.push_back(review_id_of(r.misses[j]));
          }
        }
        store->wait_done(pending, std::chrono::milliseconds(100));
      }
    });
  }
  threads.clear();
  for (const auto& r : reviews) {
    CHECK(store->state(review_id_of(r)) == ProcessingState::kDone);
    CHECK(store->commit_count(review_id_of(r)) == 1);
  }
}

TEST_CASE("sqlite persistence survives reopen") {
  const std::string path =
      (std::filesystem::temp_directory_path() / ("reviewlens_store_" + std::to_string(getpid()) + ".db"))
          .string();
  std::filesystem::remove(path);
  const auto reviews = testing::synthetic_reviews("P", "Persistent Thing", 20, 8);
  {
    auto store = Store::open(path);
    store->add_reviews(reviews);
    store->lookup("P", kVersion);
    for (int i = 0; i < 12; ++i) store->commit(processed_of(reviews[i]));
  }
  {
    auto store = Store::open(path);
    CHECK(store->review_count() == 20);
    CHECK(store->product("P").title == "Persistent Thing");
    CHECK(store->fetch_review(review_id_of(reviews[3])) == reviews[3]);
    const LookupResult r = store->lookup("P", kVersion);
    CHECK(r.hits.size() == 12);
    CHECK(r.misses.size() == 8);  // in-flight claims do not persist
    for (const auto& h : r.hits) {
      CHECK(h.processed == processed_of(store->fetch_review(h.meta.review_id)));
    }
  }
  for (const char* suffix : {"", "-wal", "-shm"}) std::filesystem::remove(path + suffix);
}

}  // namespace
}  // namespace reviewlens
