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

#include "reviewlens/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reviewlens/errors.h"

namespace reviewlens {

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

// Bumped whenever tokenize() changes behavior.
constexpr std::string_view kTokenizerVersion = "tokenizer-v1";

void fnv_mix(uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  // Field separator so ("ab","c") and ("a","bc") hash apart.
  h ^= 0x1f;
  h *= kFnvPrime;
}

bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

int64_t parse_int(std::string_view field, std::string_view text) {
  text = trim(text);
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(std::string(field) + ": not an integer: '" +
                     std::string(text) + "'");
  }
  return value;
}

// SNAP stores scores as "4.0" and times as integral seconds.
int parse_score(std::string_view text) {
  text = trim(text);
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("review/score: not a number: '" + std::string(text) + "'");
  }
  if (value != std::floor(value) || value < 1 || value > 5) {
    throw ParseError("review/score: must be an integer in [1,5]: '" +
                     std::string(text) + "'");
  }
  return static_cast<int>(value);
}

}  // namespace

std::string ReviewId::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[15 - i] = kDigits[(value >> (4 * i)) & 0xf];
  }
  return out;
}

ReviewId ReviewId::from_hex(std::string_view text) {
  uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (text.empty() || text.size() > 16 || ec != std::errc() ||
      ptr != text.data() + text.size()) {
    throw ParseError("bad review id: '" + std::string(text) + "'");
  }
  return ReviewId{value};
}

ReviewId review_id_of(const RawReview& review) {
  uint64_t h = kFnvOffset;
  fnv_mix(h, review.product_id);
  fnv_mix(h, review.user_id);
  fnv_mix(h, std::to_string(review.timestamp));
  fnv_mix(h, review.summary);
  return ReviewId{h};
}

ReviewMeta meta_of(const RawReview& review) {
  return ReviewMeta{review_id_of(review), review.product_id,  review.user_id,
                    review.profile_name,  review.helpful_votes, review.unhelpful_votes,
                    review.rating,        review.timestamp,   review.summary};
}

StopWordList::StopWordList(std::initializer_list<std::string_view> words) {
  for (auto w : words) add(w);
}

void StopWordList::add(std::string_view word) {
  word = trim(word);
  if (word.empty()) return;
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  words_.insert(std::move(lower));
}

void StopWordList::add_stream(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) add(word);
  }
}

void StopWordList::add_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open stop-word file " + path);
  add_stream(in);
}

bool StopWordList::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

int32_t Vocabulary::intern(std::string_view word) {
  auto it = word_to_id_.find(std::string(word));
  if (it != word_to_id_.end()) return it->second;
  auto id = static_cast<int32_t>(id_to_word_.size());
  id_to_word_.emplace_back(word);
  word_to_id_.emplace(id_to_word_.back(), id);
  return id;
}

std::optional<int32_t> Vocabulary::find(std::string_view word) const {
  auto it = word_to_id_.find(std::string(word));
  if (it == word_to_id_.end()) return std::nullopt;
  return it->second;
}

size_t ProductCorpus::token_count() const {
  size_t n = 0;
  for (const auto& r : reviews) n += r.token_ids.size();
  return n;
}

RawReview parse_snap_record(std::string_view block) {
  std::map<std::string_view, std::string_view> fields;
  while (!block.empty()) {
    auto eol = block.find('\n');
    std::string_view line = block.substr(0, eol);
    block = eol == std::string_view::npos ? std::string_view{} : block.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("line without ':' in SNAP record: '" + std::string(line) + "'");
    }
    std::string_view key = trim(line.substr(0, colon));
    std::string_view value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    fields[key] = value;
  }

  auto required = [&](std::string_view key) -> std::string_view {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw RecordRejected("missing field " + std::string(key));
    }
    return it->second;
  };

  RawReview r;
  r.product_id = std::string(trim(required("product/productId")));
  r.user_id = std::string(trim(required("review/userId")));
  r.profile_name = std::string(required("review/profileName"));
  std::string_view helpfulness = trim(required("review/helpfulness"));
  std::string_view score = required("review/score");
  std::string_view time = required("review/time");
  r.summary = std::string(required("review/summary"));
  r.text = std::string(required("review/text"));
  if (auto it = fields.find("product/title"); it != fields.end()) {
    r.product_title = std::string(it->second);
  }

  auto slash = helpfulness.find('/');
  if (slash == std::string_view::npos) {
    throw ParseError("review/helpfulness: expected 'a/b': '" +
                     std::string(helpfulness) + "'");
  }
  int64_t helpful = parse_int("review/helpfulness", helpfulness.substr(0, slash));
  int64_t total = parse_int("review/helpfulness", helpfulness.substr(slash + 1));
  if (helpful < 0 || total < helpful) {
    throw ParseError("review/helpfulness: inconsistent votes '" +
                     std::string(helpfulness) + "'");
  }
  r.helpful_votes = helpful;
  r.unhelpful_votes = total - helpful;
  r.rating = parse_score(score);
  r.timestamp = parse_int("review/time", time);
  return r;
}

std::string serialize_snap_record(const RawReview& r) {
  std::ostringstream out;
  out << "product/productId: " << r.product_id << '\n';
  if (!r.product_title.empty()) out << "product/title: " << r.product_title << '\n';
  out << "review/userId: " << r.user_id << '\n'
      << "review/profileName: " << r.profile_name << '\n'
      << "review/helpfulness: " << r.helpful_votes << '/'
      << (r.helpful_votes + r.unhelpful_votes) << '\n'
      << "review/score: " << r.rating << ".0\n"
      << "review/time: " << r.timestamp << '\n'
      << "review/summary: " << r.summary << '\n'
      << "review/text: " << r.text << '\n';
  return out.str();
}

SnapStats read_snap_stream(std::istream& in,
                           const std::function<void(RawReview&&)>& sink,
                           size_t limit) {
  SnapStats stats;
  std::string block;
  std::string line;
  auto flush = [&] {
    if (trim(block).empty()) {
      block.clear();
      return;
    }
    try {
      sink(parse_snap_record(block));
      ++stats.parsed;
    } catch (const RecordRejected&) {
      ++stats.rejected;
    } catch (const ParseError&) {
      ++stats.rejected;
    }
    block.clear();
  };
  while (std::getline(in, line)) {
    if (limit != 0 && stats.parsed >= limit) return stats;
    if (trim(line).empty()) {
      flush();
    } else {
      block += line;
      block += '\n';
    }
  }
  if (limit == 0 || stats.parsed < limit) flush();
  return stats;
}

std::vector<std::string> tokenize(
    std::string_view text, const StopWordList& stops,
    const std::unordered_set<std::string>& product_name_words) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (start == pos) break;

    std::string token;
    token.reserve(pos - start);
    bool alphabetic = true;
    for (size_t i = start; i < pos; ++i) {
      char c = text[i];
      if (is_punct(c)) continue;
      if (!is_alpha(c)) {
        alphabetic = false;
        break;
      }
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (!alphabetic || token.size() < 2) continue;
    if (stops.contains(token) || product_name_words.count(token) != 0) continue;
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::unordered_set<std::string> product_name_words(std::string_view title) {
  auto tokens = tokenize(title, StopWordList{}, {});
  return {tokens.begin(), tokens.end()};
}

uint64_t preprocessing_version(const std::unordered_set<std::string>& name_words) {
  std::vector<std::string_view> sorted(name_words.begin(), name_words.end());
  std::sort(sorted.begin(), sorted.end());
  uint64_t h = kFnvOffset;
  fnv_mix(h, kTokenizerVersion);
  for (auto w : sorted) fnv_mix(h, w);
  return h;
}

PreprocessedReview preprocess(const RawReview& review,
                              const std::unordered_set<std::string>& name_words) {
  return PreprocessedReview{review_id_of(review),
                            tokenize(review.text, StopWordList{}, name_words),
                            preprocessing_version(name_words)};
}

ProductCorpus assemble_corpus(std::span<const ReviewMeta> metas,
                              std::span<const std::vector<std::string>> tokens,
                              const StopWordList& stops) {
  if (metas.size() != tokens.size()) {
    throw ContractError("assemble_corpus: metas and tokens differ in length");
  }
  ProductCorpus corpus;
  std::unordered_set<ReviewId, ReviewIdHash> seen;
  for (size_t i = 0; i < metas.size(); ++i) {
    if (!seen.insert(metas[i].review_id).second) continue;
    ProcessedReview pr;
    pr.review_id = metas[i].review_id;
    pr.meta = metas[i];
    for (const auto& tok : tokens[i]) {
      if (stops.contains(tok)) continue;
      pr.token_ids.push_back(corpus.vocabulary.intern(tok));
    }
    corpus.reviews.push_back(std::move(pr));
  }
  return corpus;
}

ProductCorpus build_corpus(std::span<const RawReview> reviews,
                           const StopWordList& stops,
                           std::string_view product_title) {
  if (reviews.empty()) throw EmptyCorpusError("build_corpus: no reviews");
  const auto names = product_name_words(product_title);
  std::vector<ReviewMeta> metas;
  std::vector<std::vector<std::string>> tokens;
  metas.reserve(reviews.size());
  tokens.reserve(reviews.size());
  for (const auto& r : reviews) {
    if (r.product_id != reviews.front().product_id) {
      throw ContractError("build_corpus: reviews span several products");
    }
    metas.push_back(meta_of(r));
    tokens.push_back(tokenize(r.text, stops, names));
  }
  return assemble_corpus(metas, tokens, stops);
}

}  // namespace reviewlens
