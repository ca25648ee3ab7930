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

#include "reviewlens/json_io.h"

namespace reviewlens {

using nlohmann::json;

void to_json(json& j, const ReviewId& id) { j = id.hex(); }

void to_json(json& j, const RawReview& r) {
  j = json{{"review_id", review_id_of(r)},
           {"product_id", r.product_id},
           {"user_id", r.user_id},
           {"profile_name", r.profile_name},
           {"helpful_votes", r.helpful_votes},
           {"unhelpful_votes", r.unhelpful_votes},
           {"rating", r.rating},
           {"time", r.timestamp},
           {"summary", r.summary},
           {"text", r.text}};
}

void to_json(json& j, const ReviewMeta& m) {
  j = json{{"review_id", m.review_id},
           {"user_id", m.user_id},
           {"profile_name", m.profile_name},
           {"helpful_votes", m.helpful_votes},
           {"unhelpful_votes", m.unhelpful_votes},
           {"rating", m.rating},
           {"time", m.timestamp},
           {"summary", m.summary}};
}

void to_json(json& j, const AugmentedLemma& l) {
  j = json{{"word", l.word}, {"count", l.count}, {"weight", l.weight}};
}

void to_json(json& j, const TopicSummary& t) {
  j = json{{"topic", t.topic},
           {"probability", t.probability},
           {"lemmas", t.lemmas},
           {"rating", t.rating},
           {"nearest_topic", t.nearest_topic},
           {"nearest_distance", t.nearest_distance},
           {"similarity_percent", t.similarity_percent},
           {"representative_review", t.representative_review},
           {"top_reviews", t.top_reviews}};
}

void to_json(json& j, const ReviewSummary& r) {
  to_json(j, r.meta);
  j["theta"] = r.theta;
}

void to_json(json& j, const ProductSummary& p) {
  j = json{{"product_id", p.product_id},
           {"title", p.title},
           {"num_topics", p.num_topics},
           {"topics", p.topics},
           {"reviews", p.reviews}};
}

void to_json(json& j, const ComparisonSummary& c) {
  auto stamp = [](const SideStamp& s) {
    return json{{"instance", s.instance},
                {"iteration", s.iteration},
                {"log_likelihood", s.log_likelihood}};
  };
  j = json{{"job_id", c.job_id},
           {"version", c.version},
           {"done", c.done},
           {"reference_stamp", stamp(c.reference_stamp)},
           {"other_stamp", stamp(c.other_stamp)},
           {"reference", c.reference},
           {"other", c.other}};
}

void to_json(json& j, const ProductListing& p) {
  j = json{{"product_id", p.product_id}, {"title", p.title}, {"review_count", p.review_count}};
}

}  // namespace reviewlens
