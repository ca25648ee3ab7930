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

#include "reviewlens/store.h"

#include <sqlite3.h>

#include <algorithm>
#include <sstream>

#include "reviewlens/errors.h"

namespace reviewlens {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

// Thin write-through persistence. Every call happens under Store::mu_.
class SqliteBackend {
 public:
  explicit SqliteBackend(const std::string& path) {
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error("cannot open store " + path + ": " + msg);
    }
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
    exec("CREATE TABLE IF NOT EXISTS products("
         "product_id TEXT PRIMARY KEY, title TEXT NOT NULL)");
    exec("CREATE TABLE IF NOT EXISTS reviews("
         "review_id INTEGER PRIMARY KEY, seq INTEGER NOT NULL, product_id TEXT NOT NULL,"
         "product_title TEXT, user_id TEXT, profile_name TEXT, helpful INTEGER,"
         "unhelpful INTEGER, rating INTEGER, time INTEGER, summary TEXT, text TEXT)");
    exec("CREATE TABLE IF NOT EXISTS processed("
         "review_id INTEGER PRIMARY KEY, config_version INTEGER NOT NULL, tokens TEXT NOT NULL)");
  }
  ~SqliteBackend() { sqlite3_close(db_); }

  SqliteBackend(const SqliteBackend&) = delete;
  SqliteBackend& operator=(const SqliteBackend&) = delete;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(std::string("sqlite: ") + msg);
    }
  }

  class Statement {
   public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
      if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
        throw Error(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
      }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, int64_t v) {
      sqlite3_bind_int64(stmt_, i, v);
      return *this;
    }
    Statement& bind(int i, const std::string& v) {
      sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
      return *this;
    }
    bool step() {
      int rc = sqlite3_step(stmt_);
      if (rc == SQLITE_ROW) return true;
      if (rc != SQLITE_DONE) throw Error(std::string("sqlite step: ") + sqlite3_errmsg(db_));
      return false;
    }
    void run() {
      step();
      sqlite3_reset(stmt_);
      sqlite3_clear_bindings(stmt_);
    }
    int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    std::string text(int col) const {
      auto p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
      return p ? std::string(p, sqlite3_column_bytes(stmt_, col)) : std::string();
    }

   private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
  };

  sqlite3* handle() { return db_; }

  void put_product(const std::string& id, const std::string& title) {
    Statement s(db_, "INSERT OR REPLACE INTO products(product_id, title) VALUES(?, ?)");
    s.bind(1, id).bind(2, title).run();
  }

  void put_reviews(std::span<const std::pair<ReviewId, const RawReview*>> rows, int64_t seq0) {
    exec("BEGIN");
    Statement s(db_,
                "INSERT OR IGNORE INTO reviews(review_id, seq, product_id, product_title,"
                " user_id, profile_name, helpful, unhelpful, rating, time, summary, text)"
                " VALUES(?,?,?,?,?,?,?,?,?,?,?,?)");
    for (size_t i = 0; i < rows.size(); ++i) {
      const RawReview& r = *rows[i].second;
      s.bind(1, static_cast<int64_t>(rows[i].first.value))
          .bind(2, seq0 + static_cast<int64_t>(i))
          .bind(3, r.product_id)
          .bind(4, r.product_title)
          .bind(5, r.user_id)
          .bind(6, r.profile_name)
          .bind(7, r.helpful_votes)
          .bind(8, r.unhelpful_votes)
          .bind(9, static_cast<int64_t>(r.rating))
          .bind(10, r.timestamp)
          .bind(11, r.summary)
          .bind(12, r.text)
          .run();
    }
    exec("COMMIT");
  }

  void put_processed(std::span<const PreprocessedReview* const> rows) {
    exec("BEGIN");
    Statement s(db_,
                "INSERT OR REPLACE INTO processed(review_id, config_version, tokens)"
                " VALUES(?,?,?)");
    for (const auto* p : rows) {
      s.bind(1, static_cast<int64_t>(p->review_id.value))
          .bind(2, static_cast<int64_t>(p->config_version))
          .bind(3, join_tokens(p->tokens))
          .run();
    }
    exec("COMMIT");
  }

 private:
  sqlite3* db_ = nullptr;
};

Store::Store() = default;
Store::~Store() = default;

std::unique_ptr<Store> Store::open(const std::string& path) {
  std::unique_ptr<Store> store(new Store());
  if (path.empty()) return store;
  store->db_ = std::make_unique<SqliteBackend>(path);

  using Stmt = SqliteBackend::Statement;
  auto* db = store->db_->handle();
  {
    Stmt s(db, "SELECT product_id, title FROM products");
    while (s.step()) {
      auto id = s.text(0);
      store->products_[id] = ProductRecord{id, s.text(1), {}};
    }
  }
  {
    Stmt s(db,
           "SELECT review_id, product_id, product_title, user_id, profile_name, helpful,"
           " unhelpful, rating, time, summary, text FROM reviews ORDER BY seq");
    while (s.step()) {
      RawReview r;
      ReviewId id{static_cast<uint64_t>(s.integer(0))};
      r.product_id = s.text(1);
      r.product_title = s.text(2);
      r.user_id = s.text(3);
      r.profile_name = s.text(4);
      r.helpful_votes = s.integer(5);
      r.unhelpful_votes = s.integer(6);
      r.rating = static_cast<int>(s.integer(7));
      r.timestamp = s.integer(8);
      r.summary = s.text(9);
      r.text = s.text(10);
      auto& product = store->products_[r.product_id];
      if (product.product_id.empty()) {
        product.product_id = r.product_id;
        product.title = r.product_title.empty() ? r.product_id : r.product_title;
      }
      product.review_ids.push_back(id);
      store->reviews_[id].raw = std::move(r);
      store->next_seq_++;
    }
  }
  {
    Stmt s(db, "SELECT review_id, config_version, tokens FROM processed");
    while (s.step()) {
      ReviewId id{static_cast<uint64_t>(s.integer(0))};
      auto it = store->reviews_.find(id);
      if (it == store->reviews_.end()) continue;
      it->second.processed = PreprocessedReview{id, split_tokens(s.text(2)),
                                                static_cast<uint64_t>(s.integer(1))};
      it->second.state = ProcessingState::kDone;
    }
  }
  return store;
}

Store::Entry& Store::entry_locked(ReviewId id) {
  auto it = reviews_.find(id);
  if (it == reviews_.end()) throw NotFoundError("unknown review " + id.hex());
  return it->second;
}

const Store::Entry& Store::entry_locked(ReviewId id) const {
  auto it = reviews_.find(id);
  if (it == reviews_.end()) throw NotFoundError("unknown review " + id.hex());
  return it->second;
}

size_t Store::add_reviews(std::span<const RawReview> reviews) {
  std::lock_guard lock(mu_);
  std::vector<std::pair<ReviewId, const RawReview*>> added;
  std::vector<std::string> new_products;
  for (const auto& r : reviews) {
    const ReviewId id = review_id_of(r);
    if (reviews_.count(id) != 0) continue;
    auto& product = products_[r.product_id];
    if (product.product_id.empty()) {
      product.product_id = r.product_id;
      product.title = r.product_title.empty() ? r.product_id : r.product_title;
      new_products.push_back(r.product_id);
    }
    product.review_ids.push_back(id);
    reviews_[id].raw = r;
    added.emplace_back(id, &r);
  }
  if (db_) {
    for (const auto& id : new_products) db_->put_product(id, products_[id].title);
    db_->put_reviews(added, static_cast<int64_t>(next_seq_));
  }
  next_seq_ += added.size();
  return added.size();
}

void Store::set_title(const std::string& product_id, const std::string& title) {
  std::lock_guard lock(mu_);
  auto it = products_.find(product_id);
  if (it == products_.end()) throw NotFoundError("unknown product " + product_id);
  it->second.title = title;
  if (db_) db_->put_product(product_id, title);
}

ProductRecord Store::product(const std::string& product_id) const {
  std::lock_guard lock(mu_);
  auto it = products_.find(product_id);
  if (it == products_.end()) throw NotFoundError("unknown product " + product_id);
  return it->second;
}

bool Store::has_product(const std::string& product_id) const {
  std::lock_guard lock(mu_);
  return products_.count(product_id) != 0;
}

std::vector<ProductListing> Store::search(std::string_view query, size_t limit) const {
  const std::string needle = lowercase(query);
  std::vector<ProductListing> out;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, p] : products_) {
      if (lowercase(p.title).find(needle) == std::string::npos) continue;
      out.push_back({id, p.title, p.review_ids.size()});
    }
  }
  std::sort(out.begin(), out.end(), [](const ProductListing& a, const ProductListing& b) {
    return a.review_count != b.review_count ? a.review_count > b.review_count
                                            : a.product_id < b.product_id;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

LookupResult Store::lookup(const std::string& product_id, uint64_t config_version) {
  std::lock_guard lock(mu_);
  auto it = products_.find(product_id);
  if (it == products_.end()) throw NotFoundError("unknown product " + product_id);

  LookupResult out;
  for (ReviewId id : it->second.review_ids) {
    Entry& e = reviews_.at(id);
    if (e.state == ProcessingState::kDone && e.processed->config_version == config_version) {
      out.hits.push_back({meta_of(e.raw), *e.processed});
      continue;
    }
    out.misses.push_back(e.raw);
    if (e.state == ProcessingState::kInFlight) {
      out.claimed.push_back(false);
      continue;
    }
    // Unprocessed, or done under another config version.
    e.state = ProcessingState::kInFlight;
    e.processed.reset();
    e.ticket.reset();
    out.claimed.push_back(true);
  }
  return out;
}

size_t Store::schedule(std::span<const ReviewId> ids, Priority priority) {
  size_t accepted = 0;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    for (ReviewId id : ids) {
      auto it = reviews_.find(id);
      if (it == reviews_.end()) continue;
      Entry& e = it->second;
      if (e.state != ProcessingState::kUnprocessed) continue;
      if (e.ticket) {
        if (*e.ticket == Priority::kBackground && priority == Priority::kOnDemand) {
          e.ticket = Priority::kOnDemand;
          e.ticket_seq = next_seq_++;
          on_demand_.push_back({id, e.ticket_seq, now});
        }
        continue;
      }
      e.ticket = priority;
      e.ticket_seq = next_seq_++;
      (priority == Priority::kOnDemand ? on_demand_ : background_)
          .push_back({id, e.ticket_seq, now});
      ++accepted;
    }
  }
  if (accepted > 0) ticket_cv_.notify_all();
  return accepted;
}

std::optional<WorkTicket> Store::pop_locked() {
  for (auto* queue : {&on_demand_, &background_}) {
    const Priority prio = queue == &on_demand_ ? Priority::kOnDemand : Priority::kBackground;
    while (!queue->empty()) {
      QueuedTicket q = queue->front();
      queue->pop_front();
      auto it = reviews_.find(q.id);
      if (it == reviews_.end()) continue;
      Entry& e = it->second;
      // Superseded by an upgrade or retired by a lookup claim.
      if (e.ticket != prio || e.ticket_seq != q.seq) continue;
      e.ticket.reset();
      if (e.state != ProcessingState::kUnprocessed) continue;
      e.state = ProcessingState::kInFlight;
      return WorkTicket{q.id, prio, q.enqueued};
    }
  }
  return std::nullopt;
}

std::optional<WorkTicket> Store::take_ticket() {
  std::lock_guard lock(mu_);
  return pop_locked();
}

std::optional<WorkTicket> Store::wait_ticket(std::stop_token stop,
                                             std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  std::optional<WorkTicket> ticket;
  ticket_cv_.wait_for(lock, timeout, [&] {
    ticket = pop_locked();
    return ticket.has_value() || stop.stop_requested();
  });
  return ticket;
}

bool Store::commit_locked(const PreprocessedReview& p) {
  Entry& e = entry_locked(p.review_id);
  if (e.state == ProcessingState::kDone) {
    if (e.processed->config_version == p.config_version) {
      if (e.processed->tokens != p.tokens) {
        throw IntegrityError("review " + p.review_id.hex() +
                             " committed twice with different content");
      }
      return false;
    }
  }
  e.processed = p;
  e.state = ProcessingState::kDone;
  e.ticket.reset();
  ++e.commits;
  return true;
}

void Store::commit(const PreprocessedReview& processed) {
  commit_batch(std::span<const PreprocessedReview>(&processed, 1));
}

void Store::commit_batch(std::span<const PreprocessedReview> processed) {
  {
    std::lock_guard lock(mu_);
    // Validate first so a failing batch leaves no partial state behind.
    for (const auto& p : processed) {
      const Entry& e = entry_locked(p.review_id);
      if (e.state == ProcessingState::kDone &&
          e.processed->config_version == p.config_version && e.processed->tokens != p.tokens) {
        throw IntegrityError("review " + p.review_id.hex() +
                             " committed twice with different content");
      }
    }
    std::vector<const PreprocessedReview*> written;
    for (const auto& p : processed) {
      if (commit_locked(p)) written.push_back(&p);
    }
    if (db_ && !written.empty()) db_->put_processed(written);
  }
  done_cv_.notify_all();
}

void Store::release(ReviewId id) {
  {
    std::lock_guard lock(mu_);
    Entry& e = entry_locked(id);
    if (e.state == ProcessingState::kInFlight) e.state = ProcessingState::kUnprocessed;
  }
  done_cv_.notify_all();
}

bool Store::wait_done(std::span<const ReviewId> ids, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return done_cv_.wait_for(lock, timeout, [&] {
    return std::all_of(ids.begin(), ids.end(), [&](ReviewId id) {
      return entry_locked(id).state == ProcessingState::kDone;
    });
  });
}

std::string Store::fetch_review_text(ReviewId id) const {
  std::lock_guard lock(mu_);
  return entry_locked(id).raw.text;
}

RawReview Store::fetch_review(ReviewId id) const {
  std::lock_guard lock(mu_);
  return entry_locked(id).raw;
}

std::optional<PreprocessedReview> Store::processed(ReviewId id) const {
  std::lock_guard lock(mu_);
  return entry_locked(id).processed;
}

ProcessingState Store::state(ReviewId id) const {
  std::lock_guard lock(mu_);
  return entry_locked(id).state;
}

size_t Store::commit_count(ReviewId id) const {
  std::lock_guard lock(mu_);
  return entry_locked(id).commits;
}

size_t Store::live_tickets() const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& [id, e] : reviews_) n += e.ticket.has_value();
  return n;
}

size_t Store::review_count() const {
  std::lock_guard lock(mu_);
  return reviews_.size();
}

std::vector<ReviewId> Store::unprocessed() const {
  std::lock_guard lock(mu_);
  std::vector<ReviewId> out;
  for (const auto& [name, p] : products_) {
    for (ReviewId id : p.review_ids) {
      if (reviews_.at(id).state == ProcessingState::kUnprocessed) out.push_back(id);
    }
  }
  return out;
}

}  // namespace reviewlens
