// Copyright 2026 The fatkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatkit/density.hpp"
#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

enum class CounterfactualMode {
  implicit,        // any class other than the original prediction
  explicit_class,  // exactly target_class
  same_class,      // the original prediction, with at least one change
};

std::string_view to_string(CounterfactualMode mode);
CounterfactualMode parse_counterfactual_mode(std::string_view name);

enum class RequiredRule {
  all,  // every required feature must change
  any,  // at least one required feature must change
};

struct CounterfactualConfig {
  std::size_t max_changes = 2;
  // Per-feature candidate values. Missing features use default_grid.
  std::map<std::string, std::vector<Cell>> grids;
  // nullopt = every feature. An empty list is an ArgumentError.
  std::optional<std::vector<std::string>> searchable;
  std::vector<std::string> required;
  RequiredRule required_rule = RequiredRule::all;
  CounterfactualMode mode = CounterfactualMode::implicit;
  std::optional<std::string> target_class;
  std::size_t max_results = 10;
};

// Numeric: nearest-rank deciles (p = 0.1, ..., 1.0) of the observed values,
// deduplicated. Categorical: the value-set codes.
std::vector<double> default_grid(const Dataset& dataset, std::size_t feature);

struct Change {
  std::size_t feature = 0;
  std::string name;
  double from = 0.0;  // encoded
  double to = 0.0;    // encoded
};

struct Counterfactual {
  std::vector<Change> changes;  // schema order
  std::vector<double> row;      // encoded counterfactual row
  std::string predicted;
  double distance = 0.0;  // mixed_distance to the instance
  std::optional<double> density;
  std::vector<std::size_t> grid_positions;  // parallel to changes
};

struct CounterfactualSearch {
  std::string original_class;
  std::vector<Counterfactual> counterfactuals;
  std::size_t evaluated = 0;
  std::size_t max_changes = 0;                // effective k
  std::vector<std::string> searchable;        // schema order
  std::map<std::string, std::vector<double>> grids;  // encoded, as searched
  std::optional<std::string> diagnostic;      // "search exhausted ..." when empty
};

// Exhaustive search over every subset of at most k searchable features and
// every combination of grid values differing from the instance. Ranked by
// (number of changes, distance, sorted changed-feature names, grid
// positions), truncated to max_results. `dataset` supplies the schema and
// default grids. k larger than the searchable set is clamped.
CounterfactualSearch find_counterfactuals(const Model& model, const Dataset& dataset,
                                          std::span<const double> instance,
                                          const CounterfactualConfig& config = {});

// Sets each counterfactual's density score; order is unchanged.
void annotate_density(std::vector<Counterfactual>& counterfactuals,
                      const DensityEstimator& estimator);

// Annotates density scores and stably re-ranks ascending by (density,
// distance). Low density score = feasible.
void score_feasibility(std::vector<Counterfactual>& counterfactuals,
                       const DensityEstimator& estimator);

struct FairnessVerdict {
  bool fair = true;
  std::vector<std::string> protected_features;
  CounterfactualSearch search;  // scope: search.max_changes, search.grids
};

// Implicit-mode search in which at least one protected feature must change.
// Protected features are added to the searchable set. A foil counts when
// reverting its protected changes restores the original prediction. Unfair
// iff any such foil exists within that scope.
FairnessVerdict counterfactual_fairness(const Model& model, const Dataset& dataset,
                                        std::span<const double> instance,
                                        std::span<const std::string> protected_features,
                                        CounterfactualConfig config = {});

CounterfactualSearch same_class_variations(const Model& model, const Dataset& dataset,
                                           std::span<const double> instance,
                                           CounterfactualConfig config = {});

// "Had this instance had x1 = 0.3 instead of 0.2, it would have been
// predicted as "1"."
std::string render_counterfactual(const FeatureSchema& schema, const Counterfactual& cf,
                                  CounterfactualMode mode = CounterfactualMode::implicit);

}  // namespace fatkit
