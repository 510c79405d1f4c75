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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nfl/costs.hpp"
#include "nfl/domain.hpp"

namespace nfl {

// A named, deterministic map from training sets to hypotheses.
class Learner {
 public:
  using Rule = std::function<StochasticHypothesis(const FiniteDomain&, const Dataset&)>;

  Learner(std::string name, Rule rule) : name_(std::move(name)), rule_(std::move(rule)) {}

  const std::string& name() const { return name_; }
  StochasticHypothesis train(const FiniteDomain& domain, const Dataset& d) const {
    return rule_(domain, d);
  }

 private:
  std::string name_;
  Rule rule_;
};

// The more common label in d_Y; ties go to label 1.
std::size_t majority_label(const Dataset& d);

// Predicts the majority label off the training set and memorizes d on it
// (the latest pair wins when an input repeats). Binary Y only.
Learner majority_learner();
// Same on the training set; predicts the complement of the majority label off it.
Learner anti_majority_learner();
// Ignores d and returns h_star.
Learner constant_learner(StochasticHypothesis h_star);
// Ignores d and predicts `label` everywhere. Registry name "constant:<label>".
Learner constant_label_learner(std::size_t label);
// Uniform over Y at every query. Binary Y only.
Learner random_guess_learner();

// Leave-one-out: mean over i of the expected loss at d_X(i) of the learner
// trained on d without pair i. Requires m >= 2.
Rational loo_cv_error(const Learner& algo, const FiniteDomain& domain, const Dataset& d,
                      const LossFunction& loss);

enum class CvSelectionMode { kMin, kMax };

// Index of the lowest (kMin) or highest (kMax) LOO error; ties go to the
// lowest index.
std::size_t cv_select(const std::vector<Learner>& algos, CvSelectionMode mode,
                      const FiniteDomain& domain, const Dataset& d, const LossFunction& loss);

// Cross-validation (kMin) or anti-cross-validation (kMax) over `algos`. The CV
// loss defaults to zero-one on the training domain.
Learner cv_meta(std::vector<Learner> algos, CvSelectionMode mode,
                std::optional<LossFunction> cv_loss = std::nullopt);

// Registry lookup: "majority", "anti-majority", "random", "constant:<y>",
// "cv:min:<a>,<b>,...", "cv:max:<a>,<b>,...". Throws InvalidArgumentError
// naming the offending token.
Learner make_learner(std::string_view name);
// Examples of every registry form, for `list`.
std::vector<std::string> learner_registry_examples();

}  // namespace nfl
