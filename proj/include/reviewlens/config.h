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

// Key-value configuration files:
//
//   # comment
//   store = reviews.db
//   k = 10
//   stopwords = ["stopwords/english.txt", "stopwords/amazon.txt"]
//   emission_mode = iterations
//
// Relative paths resolve against the directory of the file. See README.md
// for every key.

#ifndef REVIEWLENS_CONFIG_H_
#define REVIEWLENS_CONFIG_H_

#include <istream>
#include <string>

#include "reviewlens/service.h"

namespace reviewlens {

// Throws ParseError on unknown keys or bad values.
ServiceConfig parse_config(std::istream& in, const std::string& base_dir = "");
ServiceConfig load_config(const std::string& path);

// Defaults plus the stop-word lists shipped under data/stopwords.
ServiceConfig default_config();

}  // namespace reviewlens

#endif  // REVIEWLENS_CONFIG_H_
