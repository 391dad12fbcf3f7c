// Copyright 2026 The merklesim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace merkle {

/// Bad argument to an operation: empty domain, budget larger than the
/// domain, malformed experiment configuration, and the like.
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Oracle query position outside {1, ..., n}.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// reveal_permutation() called on an oracle created without verification
/// access.
class AccessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or inconsistent protocol message / transcript.
class ProtocolViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contradictory constraint set: a position or an image bound twice.
class InconsistentConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Internal accounting failure. Maps to exit code 2 at the CLI boundary.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace merkle
