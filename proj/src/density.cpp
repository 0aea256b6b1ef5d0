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

#include "fatkit/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fatkit/errors.hpp"
#include "fatkit/parallel.hpp"

namespace fatkit {

std::string_view to_string(DensityMetric metric) {
  return metric == DensityMetric::gower ? "gower" : "euclidean_overlap";
}

DensityMetric parse_density_metric(std::string_view name) {
  if (name == "euclidean_overlap") return DensityMetric::euclidean_overlap;
  if (name == "gower") return DensityMetric::gower;
  throw ArgumentError("unknown density metric '" + std::string(name) + "'");
}

DensityEstimator DensityEstimator::fit(const Dataset& reference, const DensityOptions& options) {
  if (options.neighbour < 1) throw ArgumentError("density neighbour index must be >= 1");
  if (reference.rows() <= options.neighbour) {
    throw ArgumentError("density needs more than " + std::to_string(options.neighbour) +
                        " reference rows, got " + std::to_string(reference.rows()));
  }
  DensityEstimator est;
  est.n_ = options.neighbour;
  est.metric_ = options.metric;
  est.schema_ = reference.schema();
  if (options.features.empty()) {
    for (std::size_t c = 0; c < est.schema_.size(); ++c) est.feature_index_.push_back(c);
  } else {
    est.feature_index_ = est.schema_.require_indices(options.features);
  }
  if (est.feature_index_.empty()) throw ArgumentError("density needs at least one feature");
  for (auto c : est.feature_index_) est.feature_names_.push_back(est.schema_.column(c).name);
  est.block_ = kernels::make_block(reference.features(), est.schema_, est.feature_index_);

  const std::size_t rows = reference.rows();
  est.reference_raw_.assign(rows, 0.0);
  parallel_chunks(rows, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d(rows);
    for (std::size_t i = begin; i < end; ++i) {
      est.distances(reference.row(i), d);
      d[i] = std::numeric_limits<double>::infinity();
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(est.n_ - 1), d.end());
      est.reference_raw_[i] = d[est.n_ - 1];
    }
  });
  const auto [mn, mx] = std::minmax_element(est.reference_raw_.begin(), est.reference_raw_.end());
  est.min_raw_ = *mn;
  est.max_raw_ = *mx;
  return est;
}

void DensityEstimator::distances(std::span<const double> point, std::span<double> out) const {
  if (point.size() != schema_.size()) {
    throw SchemaError("density: point has " + std::to_string(point.size()) +
                      " features, schema has " + std::to_string(schema_.size()));
  }
  const auto q = kernels::project(point, feature_index_);
  if (metric_ == DensityMetric::gower) {
    kernels::gower_to_many(block_, q, out);
  } else {
    kernels::euclid_overlap_to_many(block_, q, out);
  }
}

double DensityEstimator::raw_score(std::span<const double> point) const {
  if (block_.rows == 0) throw StateError("density estimator is not fitted");
  std::vector<double> d(block_.rows);
  distances(point, d);
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n_ - 1), d.end());
  return d[n_ - 1];
}

double DensityEstimator::normalize(double raw) const {
  if (!(max_raw_ > min_raw_)) return 0.0;
  return std::clamp((raw - min_raw_) / (max_raw_ - min_raw_), 0.0, 1.0);
}

double DensityEstimator::score(std::span<const double> point) const {
  return normalize(raw_score(point));
}

std::vector<double> DensityEstimator::scores(const RowMatrix& points) const {
  std::vector<double> out(points.rows());
  parallel_chunks(points.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = score(points.row(i));
  });
  return out;
}

std::vector<SparsePoint> sparse_points(std::span<const double> scores, double threshold) {
  std::vector<SparsePoint> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > threshold) out.push_back({i, scores[i]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SparsePoint& a, const SparsePoint& b) { return a.score > b.score; });
  return out;
}

PredictionConfidence prediction_confidence(const DensityEstimator& estimator, const Model& model,
                                           std::span<const double> point, double threshold) {
  PredictionConfidence out;
  out.prediction = model.predict_one(point).predictions.at(0);
  out.density = estimator.score(point);
  out.robust = out.density <= threshold;
  return out;
}

}  // namespace fatkit
