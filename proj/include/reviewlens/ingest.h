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

// Review records, SNAP parsing, tokenization and per-product corpus assembly.

#ifndef REVIEWLENS_INGEST_H_
#define REVIEWLENS_INGEST_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace reviewlens {

// 64-bit stable key of a review. Printed as 16 lowercase hex digits.
struct ReviewId {
  uint64_t value = 0;

  std::string hex() const;
  static ReviewId from_hex(std::string_view text);  // throws ParseError

  auto operator<=>(const ReviewId&) const = default;
};

struct ReviewIdHash {
  size_t operator()(ReviewId id) const noexcept {
    return std::hash<uint64_t>{}(id.value);
  }
};

struct RawReview {
  std::string product_id;
  std::string product_title;  // optional in SNAP; empty when absent
  std::string user_id;
  std::string profile_name;
  int64_t helpful_votes = 0;
  int64_t unhelpful_votes = 0;
  int rating = 0;
  int64_t timestamp = 0;
  std::string summary;
  std::string text;

  bool operator==(const RawReview&) const = default;
};

// Hash of (product_id, user_id, timestamp, summary).
ReviewId review_id_of(const RawReview& review);

// RawReview minus the text.
struct ReviewMeta {
  ReviewId review_id;
  std::string product_id;
  std::string user_id;
  std::string profile_name;
  int64_t helpful_votes = 0;
  int64_t unhelpful_votes = 0;
  int rating = 0;
  int64_t timestamp = 0;
  std::string summary;

  bool operator==(const ReviewMeta&) const = default;
};

ReviewMeta meta_of(const RawReview& review);

class StopWordList {
 public:
  StopWordList() = default;
  StopWordList(std::initializer_list<std::string_view> words);

  // One word per line; '#' starts a comment. Entries are lowercased.
  void add_file(const std::string& path);
  void add_stream(std::istream& in);
  void add(std::string_view word);

  bool contains(std::string_view word) const;
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Cached processed form: tokens with product-name words removed but stop
// words still present, stamped with the config version that produced them.
struct PreprocessedReview {
  ReviewId review_id;
  std::vector<std::string> tokens;
  uint64_t config_version = 0;

  bool operator==(const PreprocessedReview&) const = default;
};

class Vocabulary {
 public:
  // Returns the id of word, inserting it if new.
  int32_t intern(std::string_view word);
  std::optional<int32_t> find(std::string_view word) const;
  const std::string& word(int32_t id) const { return id_to_word_.at(id); }
  int32_t size() const { return static_cast<int32_t>(id_to_word_.size()); }
  std::span<const std::string> words() const { return id_to_word_; }

 private:
  std::vector<std::string> id_to_word_;
  std::unordered_map<std::string, int32_t> word_to_id_;
};

// Unit of modeling.
struct ProcessedReview {
  ReviewId review_id;
  std::vector<int32_t> token_ids;
  ReviewMeta meta;
};

struct ProductCorpus {
  Vocabulary vocabulary;
  std::vector<ProcessedReview> reviews;

  size_t token_count() const;
};

// Parses one SNAP record: `key: value` lines, e.g. `review/score: 4.0`.
// Throws RecordRejected when a required field is missing and ParseError on
// malformed numbers.
RawReview parse_snap_record(std::string_view block);

// Inverse of parse_snap_record. Fields must not contain newlines.
std::string serialize_snap_record(const RawReview& review);

struct SnapStats {
  size_t parsed = 0;
  size_t rejected = 0;
};

// Streams blank-line separated records, calling sink for each parsed one.
// Rejected and malformed records are counted and skipped. limit = 0 means
// no limit on parsed records.
SnapStats read_snap_stream(std::istream& in,
                           const std::function<void(RawReview&&)>& sink,
                           size_t limit = 0);

// Lowercased alphabetic tokens of length >= 2, minus stops and name words.
std::vector<std::string> tokenize(std::string_view text,
                                  const StopWordList& stops,
                                  const std::unordered_set<std::string>& product_name_words);

std::unordered_set<std::string> product_name_words(std::string_view title);

// Version stamp for cached preprocessed forms. Changes when the tokenizer
// or the product-name filter changes; stop words are applied later.
uint64_t preprocessing_version(const std::unordered_set<std::string>& name_words);

PreprocessedReview preprocess(const RawReview& review,
                              const std::unordered_set<std::string>& name_words);

// Builds the vocabulary over tokens surviving stop filtering. Duplicated
// review ids collapse to the first occurrence. Ids are assigned in first
// occurrence order, so the result is deterministic in the input order.
ProductCorpus assemble_corpus(std::span<const ReviewMeta> metas,
                              std::span<const std::vector<std::string>> tokens,
                              const StopWordList& stops);

// Throws EmptyCorpusError on an empty list.
ProductCorpus build_corpus(std::span<const RawReview> reviews,
                           const StopWordList& stops,
                           std::string_view product_title);

}  // namespace reviewlens

#endif  // REVIEWLENS_INGEST_H_
