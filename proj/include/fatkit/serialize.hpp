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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatkit/counterfactual.hpp"
#include "fatkit/density.hpp"
#include "fatkit/fairness.hpp"
#include "fatkit/grouping.hpp"
#include "fatkit/model.hpp"
#include "fatkit/surrogate.hpp"
#include "fatkit/tabular.hpp"

// JSON forms shared by the report, the CLI and the HTTP service.
namespace fatkit {

using nlohmann::json;

// Numbers for numeric columns, tokens for categorical ones.
json cell_json(const Column& column, double value);
double cell_from_json(const Column& column, const json& j);
json row_json(const FeatureSchema& schema, std::span<const double> row);
// Accepts an array in schema order or an object keyed by feature name
// (every feature required).
std::vector<double> row_from_json(const FeatureSchema& schema, const json& j);
// +inf and -inf become the strings "+inf" and "-inf".
json number_json(double v);

json summary_json(const DatasetSummary& summary);
json partition_json(const GroupPartition& partition);
json representation_json(const std::vector<RepresentationRecord>& records);
json disparity_json(const DisparityMatrix& matrix);
json confusion_json(const Confusion& c);
json thresholds_json(const ThresholdAssignment& a);
json systemic_bias_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                        std::size_t limit);

json prediction_json(const Model& model, const PredictionBatch& batch, std::size_t row);
json confidence_json(const PredictionConfidence& c, double threshold);
json density_flags_json(const DensityEstimator& est, std::span<const SparsePoint> flagged,
                        double threshold);

json counterfactual_json(const FeatureSchema& schema, const Counterfactual& cf,
                         CounterfactualMode mode);
json search_json(const FeatureSchema& schema, const CounterfactualSearch& search,
                 CounterfactualMode mode);
json verdict_json(const FeatureSchema& schema, const FairnessVerdict& verdict);

json explanation_json(const SurrogateExplanation& ex);
json ice_pd_json(const FeatureSchema& schema, const IcePd& r);

// Strict parsers: unknown keys and wrong types raise ArgumentError.
CounterfactualConfig counterfactual_config_from_json(const FeatureSchema& schema, const json& j);
json counterfactual_config_json(const FeatureSchema& schema, const CounterfactualConfig& c);
SurrogateConfig surrogate_config_from_json(const json& j);
json surrogate_config_json(const SurrogateConfig& c);

}  // namespace fatkit
