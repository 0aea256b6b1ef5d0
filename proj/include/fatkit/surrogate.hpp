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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fatkit/cart.hpp"
#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

struct NormalSampler {
  std::size_t n = 1000;
  double scale = 1.0;  // multiplier of each numeric feature's standard deviation
};

struct MixupSampler {
  std::size_t n = 1000;  // must be even
  double alpha = 1.0;
};

struct RidgeSurrogate {
  double lambda = 1.0;
};

struct TreeSurrogate {
  int max_depth = 3;
};

enum class Locality { local, global };

std::string_view to_string(Locality locality);

struct SurrogateConfig {
  std::variant<NormalSampler, MixupSampler> sampler = NormalSampler{};
  // Quartile bins and same-bin / same-value binary encoding relative to the
  // explained instance.
  bool interpretable = true;
  std::optional<double> kernel_width = 0.25;  // nullopt = uniform weights
  std::optional<std::size_t> top_m;           // nullopt = no selection
  std::variant<RidgeSurrogate, TreeSurrogate> surrogate = RidgeSurrogate{};
  std::uint64_t seed = 42;
  Locality locality = Locality::local;
};

// Step b, local normal sampling: numeric cell ~ N(centre, scale * sd)
// clipped to the schema range, categorical cell drawn from the dataset's
// empirical frequencies.
RowMatrix sample_normal(const Dataset& dataset, std::span<const double> centre, std::size_t n,
                        double scale, std::uint64_t seed);

// Global variant: each sample is centred on a dataset row drawn uniformly.
RowMatrix sample_normal_global(const Dataset& dataset, std::size_t n, double scale,
                               std::uint64_t seed);

struct MixupSample {
  RowMatrix rows;
  std::vector<std::string> classes;              // dataset classes, sorted
  std::vector<std::vector<double>> soft_labels;  // per row, over `classes`
  std::vector<double> mix;                       // per row weight of the instance
  std::vector<std::size_t> partners;             // dataset row per sample
};

// Pairs the instance with dataset rows: the first n/2 partners come from
// the instance's class and the rest from other classes. The instance cell is
// kept with weight lambda ~ Beta(alpha, alpha).
MixupSample sample_mixup(const Dataset& dataset, std::span<const double> instance,
                         std::string_view instance_label, std::size_t n, double alpha,
                         std::uint64_t seed);

// Step a: 1 iff the cell falls in the instance's quartile bin (numeric) or
// equals the instance's value (categorical). Bins come from `dataset`.
RowMatrix discretize(const Dataset& dataset, const RowMatrix& rows,
                     std::span<const double> instance);

// exp(-d^2 / w^2), d = mixed_distance(row, instance).
std::vector<double> kernel_weights(const RowMatrix& rows, std::span<const double> instance,
                                   const FeatureSchema& schema, double width);

struct LinearFit {
  std::vector<double> weights;
  double intercept = 0.0;

  double predict(std::span<const double> x) const;
};

// Weighted least squares with an L2 penalty on the weights (never the
// intercept), closed form. Singular systems raise FitError.
LinearFit fit_ridge(const RowMatrix& x, std::span<const double> targets,
                    std::span<const double> weights, double lambda);

struct FeatureSelection {
  std::vector<std::size_t> features;  // ascending
  std::optional<std::string> diagnostic;
};

// Weighted forward selection: repeatedly add the column whose ridge fit has
// the lowest weighted squared error, ties to the lowest index.
FeatureSelection select_features(const RowMatrix& x, std::span<const double> targets,
                                 std::span<const double> weights, std::size_t m, double lambda);

struct RulePredicate {
  std::string feature;
  PredicateOp op = PredicateOp::less_equal;
  double value = 0.0;
};

struct SurrogateExplanation {
  std::string kind;  // "ridge" or "tree"
  Locality locality = Locality::local;
  bool interpretable = false;
  std::string explained_class;
  std::vector<std::string> features;  // surrogate input columns, after selection
  double fidelity = 0.0;
  std::size_t sample_size = 0;
  std::vector<std::string> diagnostics;

  // ridge
  std::optional<LinearFit> linear;
  // tree
  std::vector<RulePredicate> rule;  // root-to-leaf path of the instance
  std::vector<double> importances;  // parallel to features
  std::optional<CartTree> tree;
};

struct SampleSet {
  RowMatrix rows;
  std::optional<std::vector<std::vector<double>>> soft_labels;  // over the model's classes
};

// Replaces step b. The instance span is empty for instance-free global runs.
using Sampler =
    std::function<SampleSet(const Dataset&, std::span<const double>, const SurrogateConfig&)>;

// Normal sampling (local or global by config.locality) or MixUp around the
// instance, whose label is the model's prediction for it.
SampleSet default_sample(const Model& model, const Dataset& dataset,
                         std::span<const double> instance, const SurrogateConfig& config);

// Steps a-f. `instance` is required for local explanations; when absent the
// representation is raw, weights are uniform and no rule is extracted.
SurrogateExplanation explain(const Model& model, const Dataset& dataset,
                             std::optional<std::span<const double>> instance,
                             const SurrogateConfig& config = {},
                             const Sampler& sampler = nullptr);

struct IcePd {
  std::string feature;
  std::vector<double> grid;  // encoded
  std::string quantity;      // what each ICE entry measures
  std::vector<std::vector<double>> ice;  // rows x grid
  std::vector<double> pd;
};

// ICE[r][g]: probability of `positive_class` (indicator of the predicted
// class when the model has no probabilities) with the feature set to
// grid[g]. PD is the column mean. Default class: the model's last class.
IcePd ice_pd(const Model& model, const Dataset& dataset, std::string_view feature,
             std::span<const double> grid,
             const std::optional<std::string>& positive_class = std::nullopt);

}  // namespace fatkit
