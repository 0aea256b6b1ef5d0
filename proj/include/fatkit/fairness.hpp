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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fatkit/grouping.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

// Binary confusion counts for one positive class. Rates whose denominator
// is zero are undefined (nullopt), never 0.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  std::optional<double> accuracy() const;
  std::optional<double> tpr() const;
  std::optional<double> tnr() const;
  std::optional<double> fpr() const;
  std::optional<double> fnr() const;
  std::optional<double> positive_rate() const;
};

Confusion confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                    std::string_view positive_class);

enum class FairnessCriterion { demographic_parity, equal_opportunity, equal_accuracy };
enum class PerformanceMetric { accuracy, tpr, tnr, fpr, fnr, positive_rate };

std::string_view to_string(FairnessCriterion c);
std::string_view to_string(PerformanceMetric m);
FairnessCriterion parse_criterion(std::string_view name);
PerformanceMetric parse_metric(std::string_view name);
// demographic parity -> positive rate, equal opportunity -> TPR,
// equal accuracy -> accuracy.
PerformanceMetric statistic_of(FairnessCriterion c);
std::optional<double> metric_value(const Confusion& c, PerformanceMetric m);

inline constexpr double kDefaultTolerance = 0.2;

// Pairwise absolute differences of a per-group statistic. A pair with an
// undefined statistic on either side is undefined and never flagged.
struct DisparityMatrix {
  std::string criterion;
  double tolerance = kDefaultTolerance;
  std::vector<std::string> groups;
  std::vector<std::optional<double>> statistics;
  std::vector<std::vector<double>> values;  // 0 where undefined
  std::vector<std::vector<bool>> flags;
  std::vector<std::vector<bool>> undefined;

  std::size_t flag_count() const;  // unordered pairs
  std::vector<std::pair<std::size_t, std::size_t>> flagged_pairs() const;  // i < j
};

DisparityMatrix disparity_matrix(std::string criterion, double tolerance,
                                 std::vector<std::string> groups,
                                 std::vector<std::optional<double>> statistics);

// Per-group confusion over the partition's rows.
std::vector<Confusion> group_confusions(const GroupPartition& partition,
                                        std::span<const std::string> y_true,
                                        std::span<const std::string> y_pred,
                                        std::string_view positive_class);

DisparityMatrix group_fairness(const GroupPartition& partition,
                               std::span<const std::string> y_true,
                               std::span<const std::string> y_pred,
                               FairnessCriterion criterion, std::string_view positive_class,
                               double tolerance = kDefaultTolerance);

DisparityMatrix performance_disparity(const GroupPartition& partition,
                                      std::span<const std::string> y_true,
                                      std::span<const std::string> y_pred,
                                      PerformanceMetric metric, std::string_view positive_class,
                                      double tolerance = kDefaultTolerance);

// Pairs (i < j) identical on every non-protected feature, different on at
// least one protected feature, with different labels. Sorted.
std::vector<std::pair<std::size_t, std::size_t>> systemic_bias(
    const Dataset& dataset, std::span<const std::string> protected_features);

struct ThresholdAssignment {
  std::string criterion;
  std::vector<std::string> groups;
  // Rule: score >= threshold => positive. +inf means nothing is positive.
  std::vector<double> thresholds;
  std::vector<double> achieved;  // per-group statistic under the thresholds
  std::vector<double> accuracy;  // per-group accuracy under the thresholds
  double max_gap = 0.0;
  double tolerance = kDefaultTolerance;
  bool within_tolerance = false;
};

// Chooses one threshold per group among the group's observed scores and
// +inf. Minimizes the largest pairwise gap of the criterion's statistic,
// then maximizes the number of correct predictions overall, then prefers
// the lexicographically smallest threshold vector.
// A single group takes the candidate with the largest statistic.
ThresholdAssignment fit_group_thresholds(std::span<const double> scores,
                                         const GroupPartition& partition,
                                         std::span<const std::string> y_true,
                                         FairnessCriterion criterion,
                                         std::string_view positive_class,
                                         double tolerance = kDefaultTolerance);

}  // namespace fatkit
