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

#ifndef REVIEWLENS_ERRORS_H_
#define REVIEWLENS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace reviewlens {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed field value (non-numeric score, bad helpfulness ratio, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A SNAP record lacks a required field. Bulk loaders skip these.
class RecordRejected : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Second commit of a review with content that differs from the first.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// The update pool has no emission yet.
class NotReadyError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on numeric input (non-normalized distribution, k < 2).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Topic whose theta column is identically zero has no defined rating.
class UndefinedRatingError : public Error {
 public:
  using Error::Error;
};

class BadRequest : public Error {
 public:
  using Error::Error;
};

}  // namespace reviewlens

#endif  // REVIEWLENS_ERRORS_H_
