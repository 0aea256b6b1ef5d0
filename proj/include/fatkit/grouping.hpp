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

#include "fatkit/tabular.hpp"

namespace fatkit {

enum class PartitionKind { by_value, by_threshold };

std::string_view to_string(PartitionKind kind);

struct Group {
  std::string label;
  std::vector<std::size_t> rows;  // ascending

  std::size_t count() const noexcept { return rows.size(); }
  bool operator==(const Group&) const = default;
};

// Disjoint row groups covering every row of the dataset.
struct GroupPartition {
  std::string feature;
  PartitionKind kind = PartitionKind::by_value;
  std::vector<double> thresholds;  // by_threshold only
  std::vector<Group> groups;

  std::size_t total_rows() const;
  bool operator==(const GroupPartition&) const = default;
};

// Categorical features produce one group per observed value (value-set
// order). Numeric features need strictly ascending thresholds t1 < ... < tT
// and produce T + 1 right-closed bins: (-inf, t1], (t1, t2], ..., (tT, +inf).
// Empty bins are kept.
GroupPartition partition(const Dataset& dataset, std::string_view feature,
                         const std::optional<std::vector<double>>& thresholds = std::nullopt);

// Map each row index to its group index.
std::vector<std::size_t> group_of_rows(const GroupPartition& partition);

struct RepresentationRecord {
  std::string label;
  std::size_t count = 0;
  // Over every class present in `labels`, sorted; empty for empty groups.
  std::vector<std::pair<std::string, double>> class_distribution;
  std::vector<std::pair<std::string, std::size_t>> class_counts;
  bool sampling_bias = false;
  bool class_imbalance = false;
  bool empty = false;
};

struct RepresentationDefaults {
  static constexpr double min_group_fraction = 0.05;
  static constexpr double imbalance_ratio = 3.0;
};

// Sampling-bias flag: count < min_group_fraction * total rows.
// Class-imbalance flag: max / min per-class count inside the group exceeds
// imbalance_ratio, a zero min count always flags.
std::vector<RepresentationRecord> representation_audit(
    const GroupPartition& partition, std::span<const std::string> labels,
    double min_group_fraction = RepresentationDefaults::min_group_fraction,
    double imbalance_ratio = RepresentationDefaults::imbalance_ratio);

// Nearest-rank quartiles of a numeric column, deduplicated ascending; the
// default bins for auditing a numeric protected feature.
std::vector<double> quartile_thresholds(const Dataset& dataset, std::string_view feature);

}  // namespace fatkit
