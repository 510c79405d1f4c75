// Copyright 2026 The nfl-lab Authors.
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

namespace nfl {

// Base class for every error raised by the library. Engines throw; the CLI
// catches at the top level and wraps with experiment context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration would exceed the configured item cap.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// The off-training-set region carries no sampling mass.
class EmptyOtsError : public Error {
 public:
  using Error::Error;
};

// Every function in a prior's support is inconsistent with the data.
class NoConsistentFunctionError : public Error {
 public:
  using Error::Error;
};

// A precondition on arguments failed (sizes, label ranges, odd m, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed; indicates a bug or a false theorem.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfl
