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

// Review warehouse and preprocessed-review cache.
//
// Each review moves unprocessed -> in_flight -> done. Only the caller that
// moves a review to in_flight (a lookup that claims it, or a worker taking
// its ticket) processes it, which is what keeps concurrent queries from
// preprocessing the same review twice. Cached entries whose config version
// differs from the caller's count as misses.
//
// State lives in memory behind one mutex; when opened with a path, every
// write also goes to an SQLite file that is reloaded on open.

#ifndef REVIEWLENS_STORE_H_
#define REVIEWLENS_STORE_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <unordered_map>
#include <vector>

#include "reviewlens/ingest.h"

namespace reviewlens {

enum class ProcessingState { kUnprocessed, kInFlight, kDone };
enum class Priority { kOnDemand, kBackground };

struct ProductRecord {
  std::string product_id;
  std::string title;
  std::vector<ReviewId> review_ids;
};

struct ProductListing {
  std::string product_id;
  std::string title;
  size_t review_count = 0;
};

struct WorkTicket {
  ReviewId review_id;
  Priority priority = Priority::kBackground;
  std::chrono::steady_clock::time_point enqueued;
};

struct CachedReview {
  ReviewMeta meta;
  PreprocessedReview processed;
};

struct LookupResult {
  std::vector<CachedReview> hits;
  std::vector<RawReview> misses;
  // claimed[i]: this caller moved misses[i] to in_flight and must commit or
  // release it. Unclaimed misses are in flight elsewhere.
  std::vector<bool> claimed;
};

class SqliteBackend;

class Store {
 public:
  // Empty path: memory only.
  static std::unique_ptr<Store> open(const std::string& path);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Adds reviews not seen before (by review id). Products are created on
  // first sight, titled by the review's product_title or else the id.
  // Returns the number of new reviews.
  size_t add_reviews(std::span<const RawReview> reviews);
  void set_title(const std::string& product_id, const std::string& title);

  ProductRecord product(const std::string& product_id) const;  // NotFoundError
  bool has_product(const std::string& product_id) const;
  // Case-insensitive title substring match, most-reviewed first.
  std::vector<ProductListing> search(std::string_view query, size_t limit = 50) const;

  // Partial-hit lookup. Claims every unprocessed or stale review of the
  // product. Throws NotFoundError for unknown products.
  LookupResult lookup(const std::string& product_id, uint64_t config_version);

  // Enqueues tickets for unprocessed reviews without a live ticket. A live
  // background ticket is upgraded in place by an on-demand request.
  // Returns the number of newly enqueued tickets.
  size_t schedule(std::span<const ReviewId> ids, Priority priority);

  // Dequeues the next ticket (on-demand first, then FIFO) and claims its
  // review. Tickets whose review is no longer unprocessed are retired.
  std::optional<WorkTicket> take_ticket();
  // Blocking variant for background workers.
  std::optional<WorkTicket> wait_ticket(std::stop_token stop, std::chrono::milliseconds timeout);

  // Idempotent for identical content. Throws IntegrityError when a done
  // review is committed again with different tokens under the same version.
  void commit(const PreprocessedReview& processed);
  void commit_batch(std::span<const PreprocessedReview> processed);
  // Returns a claimed review to unprocessed after a failed attempt.
  void release(ReviewId id);

  // Blocks until every id is done, or the timeout passes. Returns true when
  // all are done.
  bool wait_done(std::span<const ReviewId> ids, std::chrono::milliseconds timeout) const;

  std::string fetch_review_text(ReviewId id) const;  // NotFoundError
  RawReview fetch_review(ReviewId id) const;          // NotFoundError
  std::optional<PreprocessedReview> processed(ReviewId id) const;
  ProcessingState state(ReviewId id) const;  // NotFoundError

  // Instrumentation.
  size_t commit_count(ReviewId id) const;
  size_t live_tickets() const;
  size_t review_count() const;
  std::vector<ReviewId> unprocessed() const;

 private:
  struct Entry {
    RawReview raw;
    std::optional<PreprocessedReview> processed;
    ProcessingState state = ProcessingState::kUnprocessed;
    std::optional<Priority> ticket;
    uint64_t ticket_seq = 0;
    size_t commits = 0;
  };

  Store();
  Entry& entry_locked(ReviewId id);
  const Entry& entry_locked(ReviewId id) const;
  bool commit_locked(const PreprocessedReview& processed);
  std::optional<WorkTicket> pop_locked();

  mutable std::mutex mu_;
  mutable std::condition_variable done_cv_;
  std::condition_variable ticket_cv_;
  std::unordered_map<ReviewId, Entry, ReviewIdHash> reviews_;
  std::map<std::string, ProductRecord> products_;
  struct QueuedTicket {
    ReviewId id;
    uint64_t seq;
    std::chrono::steady_clock::time_point enqueued;
  };
  std::deque<QueuedTicket> on_demand_;
  std::deque<QueuedTicket> background_;
  uint64_t next_seq_ = 1;
  std::unique_ptr<SqliteBackend> db_;
};

}  // namespace reviewlens

#endif  // REVIEWLENS_STORE_H_
