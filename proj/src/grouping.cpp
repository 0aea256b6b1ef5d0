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

#include "fatkit/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fatkit/errors.hpp"

namespace fatkit {

std::string_view to_string(PartitionKind kind) {
  return kind == PartitionKind::by_value ? "by-value" : "by-threshold";
}

std::size_t GroupPartition::total_rows() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.count();
  return n;
}

namespace {

std::string bin_label(const std::vector<double>& t, std::size_t i) {
  const std::string lo = i == 0 ? "-inf" : format_number(t[i - 1]);
  if (i == t.size()) return "(" + lo + ", +inf)";
  return "(" + lo + ", " + format_number(t[i]) + "]";
}

}  // namespace

GroupPartition partition(const Dataset& dataset, std::string_view feature,
                         const std::optional<std::vector<double>>& thresholds) {
  const auto f = dataset.schema().require_index(feature);
  const auto& col = dataset.schema().column(f);
  GroupPartition out;
  out.feature = col.name;

  if (col.categorical()) {
    if (thresholds) {
      throw ArgumentError("thresholds given for categorical feature '" + col.name + "'");
    }
    out.kind = PartitionKind::by_value;
    std::vector<std::vector<std::size_t>> by_code(col.values.size());
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
      by_code[static_cast<std::size_t>(dataset.features()(r, f))].push_back(r);
    }
    for (std::size_t code = 0; code < by_code.size(); ++code) {
      if (by_code[code].empty()) continue;
      out.groups.push_back({col.values[code], std::move(by_code[code])});
    }
    return out;
  }

  if (!thresholds) {
    throw ArgumentError("numeric feature '" + col.name + "' needs thresholds to be partitioned");
  }
  const auto& t = *thresholds;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw ArgumentError("thresholds must be finite");
    if (i > 0 && !(t[i - 1] < t[i])) throw ArgumentError("thresholds must be strictly ascending");
  }
  out.kind = PartitionKind::by_threshold;
  out.thresholds = t;
  out.groups.resize(t.size() + 1);
  for (std::size_t i = 0; i <= t.size(); ++i) out.groups[i].label = bin_label(t, i);
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    const double v = dataset.features()(r, f);
    // First threshold >= v: bins are right-closed.
    const auto bin = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
    out.groups[bin].rows.push_back(r);
  }
  return out;
}

std::vector<std::size_t> group_of_rows(const GroupPartition& partition) {
  std::vector<std::size_t> out(partition.total_rows(), 0);
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    for (auto r : partition.groups[g].rows) {
      if (r >= out.size()) throw ArgumentError("partition row index out of range");
      out[r] = g;
    }
  }
  return out;
}

std::vector<RepresentationRecord> representation_audit(const GroupPartition& partition,
                                                       std::span<const std::string> labels,
                                                       double min_group_fraction,
                                                       double imbalance_ratio) {
  if (partition.groups.empty()) throw ArgumentError("representation audit of an empty partition");
  const std::size_t total = partition.total_rows();
  if (labels.size() != total) {
    throw ArgumentError("label count does not match the partitioned rows");
  }
  const std::set<std::string> class_set(labels.begin(), labels.end());
  const std::vector<std::string> classes(class_set.begin(), class_set.end());

  std::vector<RepresentationRecord> out;
  for (const auto& g : partition.groups) {
    RepresentationRecord rec;
    rec.label = g.label;
    rec.count = g.count();
    rec.empty = g.rows.empty();
    std::map<std::string, std::size_t> counts;
    for (const auto& c : classes) counts[c] = 0;
    for (auto r : g.rows) {
      if (r >= labels.size()) throw ArgumentError("partition row index out of range");
      ++counts[labels[r]];
    }
    std::size_t mx = 0, mn = g.rows.size();
    for (const auto& [c, n] : counts) {
      rec.class_counts.emplace_back(c, n);
      if (!rec.empty) {
        rec.class_distribution.emplace_back(c, static_cast<double>(n) /
                                                   static_cast<double>(g.rows.size()));
      }
      mx = std::max(mx, n);
      mn = std::min(mn, n);
    }
    rec.sampling_bias =
        static_cast<double>(rec.count) < min_group_fraction * static_cast<double>(total);
    if (!classes.empty()) {
      rec.class_imbalance =
          mn == 0 || static_cast<double>(mx) / static_cast<double>(mn) > imbalance_ratio;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> quartile_thresholds(const Dataset& dataset, std::string_view feature) {
  const auto f = dataset.schema().require_index(feature);
  if (!dataset.schema().column(f).numeric()) {
    throw ArgumentError("quartile thresholds need a numeric feature");
  }
  if (dataset.rows() == 0) return {};
  std::vector<double> v(dataset.rows());
  for (std::size_t r = 0; r < dataset.rows(); ++r) v[r] = dataset.features()(r, f);
  std::sort(v.begin(), v.end());
  std::vector<double> t{nearest_rank(v, 0.25), nearest_rank(v, 0.5), nearest_rank(v, 0.75)};
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace fatkit
