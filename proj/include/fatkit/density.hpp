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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatkit/kernels/kernels.hpp"
#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

enum class DensityMetric {
  // sqrt(sum of squared numeric differences + categorical mismatches),
  // raw feature units.
  euclidean_overlap,
  // mixed_distance, every feature scaled to [0, 1].
  gower,
};

std::string_view to_string(DensityMetric metric);
DensityMetric parse_density_metric(std::string_view name);

struct DensityOptions {
  std::size_t neighbour = 7;
  std::vector<std::string> features;  // empty = every feature
  DensityMetric metric = DensityMetric::euclidean_overlap;
};

inline constexpr double kSparseThreshold = 0.5;

// Distance to the n-th nearest reference row, min-max normalized against the
// reference rows' own leave-one-out scores. High = sparse.
class DensityEstimator {
 public:
  DensityEstimator() = default;

  // Rows must exceed n and n >= 1 (ArgumentError).
  static DensityEstimator fit(const Dataset& reference, const DensityOptions& options = {});

  std::size_t neighbour() const noexcept { return n_; }
  DensityMetric metric() const noexcept { return metric_; }
  std::size_t reference_rows() const noexcept { return block_.rows; }
  const std::vector<std::string>& features() const noexcept { return feature_names_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  // Per reference row: distance to its n-th nearest other reference row.
  const std::vector<double>& reference_raw() const noexcept { return reference_raw_; }
  double min_raw() const noexcept { return min_raw_; }
  double max_raw() const noexcept { return max_raw_; }

  // Distance from a full encoded row to its n-th nearest reference row.
  double raw_score(std::span<const double> point) const;
  // clip((raw - min) / (max - min), 0, 1); 0 when max == min.
  double normalize(double raw) const;
  double score(std::span<const double> point) const;
  std::vector<double> scores(const RowMatrix& points) const;

 private:
  void distances(std::span<const double> point, std::span<double> out) const;

  std::size_t n_ = 0;
  DensityMetric metric_ = DensityMetric::euclidean_overlap;
  FeatureSchema schema_;
  std::vector<std::size_t> feature_index_;
  std::vector<std::string> feature_names_;
  kernels::ReferenceBlock block_;
  std::vector<double> reference_raw_;
  double min_raw_ = 0.0;
  double max_raw_ = 0.0;
};

struct SparsePoint {
  std::size_t row = 0;
  double score = 0.0;
};

// Rows scoring strictly above threshold, sparsest first (ties by row).
std::vector<SparsePoint> sparse_points(std::span<const double> scores,
                                       double threshold = kSparseThreshold);

struct PredictionConfidence {
  std::string prediction;
  double density = 0.0;
  bool robust = true;  // density <= threshold
};

PredictionConfidence prediction_confidence(const DensityEstimator& estimator, const Model& model,
                                           std::span<const double> point,
                                           double threshold = kSparseThreshold);

}  // namespace fatkit
