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

// Line-oriented text records for domains, functions, datasets, priors,
// sampling distributions and loss tables. One record per line, comma
// separated, rationals as "num/den"; blank lines and '#' comments are skipped.
//
//   domain,<|X|>,<|Y|>
//   function,<f(0)>,...,<f(|X|-1)>
//   dataset,<weight>,<x>,<y>,<x>,<y>,...
//   prior,<weight>,<f(0)>,...,<f(|X|-1)>      one line per support function
//   sampling,<pi(0)>,...,<pi(|X|-1)>
//   loss,<L(h,0)>,...,<L(h,|Y|-1)>            one line per predicted label h
//
// A domain record must precede any record that depends on it. Writing then
// reading a document gives back an equal document.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfl/costs.hpp"
#include "nfl/domain.hpp"

namespace nfl {

struct TextDocument {
  std::optional<FiniteDomain> domain;
  std::vector<TargetFunction> functions;
  std::vector<Dataset> datasets;
  std::optional<Prior> prior;
  std::optional<SamplingDistribution> sampling;
  std::optional<LossFunction> loss;

  friend bool operator==(const TextDocument&, const TextDocument&) = default;
};

// Throws ParseError with the 1-based line number.
TextDocument read_text(std::istream& is);
TextDocument read_text(const std::string& text);
void write_text(std::ostream& os, const TextDocument& doc);
std::string write_text(const TextDocument& doc);

}  // namespace nfl
