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

// JSON shapes of the HTTP API. Field names are part of the public interface;
// see README.md for the reference.

#ifndef REVIEWLENS_JSON_IO_H_
#define REVIEWLENS_JSON_IO_H_

#include <json.hpp>

#include "reviewlens/ingest.h"
#include "reviewlens/store.h"
#include "reviewlens/summarize.h"

namespace reviewlens {

void to_json(nlohmann::json& j, const ReviewId& id);
void to_json(nlohmann::json& j, const RawReview& r);
void to_json(nlohmann::json& j, const ReviewMeta& m);
void to_json(nlohmann::json& j, const AugmentedLemma& l);
void to_json(nlohmann::json& j, const TopicSummary& t);
void to_json(nlohmann::json& j, const ReviewSummary& r);
void to_json(nlohmann::json& j, const ProductSummary& p);
void to_json(nlohmann::json& j, const ComparisonSummary& c);
void to_json(nlohmann::json& j, const ProductListing& p);

}  // namespace reviewlens

#endif  // REVIEWLENS_JSON_IO_H_
