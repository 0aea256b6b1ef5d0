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

#include "fatkit/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fatkit/errors.hpp"

namespace fatkit {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> Confusion::accuracy() const { return ratio(tp + tn, total()); }
std::optional<double> Confusion::tpr() const { return ratio(tp, tp + fn); }
std::optional<double> Confusion::tnr() const { return ratio(tn, tn + fp); }
std::optional<double> Confusion::fpr() const { return ratio(fp, tn + fp); }
std::optional<double> Confusion::fnr() const { return ratio(fn, tp + fn); }
std::optional<double> Confusion::positive_rate() const { return ratio(tp + fp, total()); }

Confusion confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                    std::string_view positive_class) {
  if (y_true.size() != y_pred.size()) {
    throw ArgumentError("y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                        std::to_string(y_pred.size()));
  }
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == positive_class;
    const bool p = y_pred[i] == positive_class;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (!t && !p) ++c.tn;
    else ++c.fn;
  }
  return c;
}

std::string_view to_string(FairnessCriterion c) {
  switch (c) {
    case FairnessCriterion::demographic_parity: return "demographic_parity";
    case FairnessCriterion::equal_opportunity: return "equal_opportunity";
    case FairnessCriterion::equal_accuracy: return "equal_accuracy";
  }
  return "?";
}

std::string_view to_string(PerformanceMetric m) {
  switch (m) {
    case PerformanceMetric::accuracy: return "accuracy";
    case PerformanceMetric::tpr: return "tpr";
    case PerformanceMetric::tnr: return "tnr";
    case PerformanceMetric::fpr: return "fpr";
    case PerformanceMetric::fnr: return "fnr";
    case PerformanceMetric::positive_rate: return "positive_rate";
  }
  return "?";
}

FairnessCriterion parse_criterion(std::string_view name) {
  for (auto c : {FairnessCriterion::demographic_parity, FairnessCriterion::equal_opportunity,
                 FairnessCriterion::equal_accuracy}) {
    if (to_string(c) == name) return c;
  }
  throw ArgumentError("unknown fairness criterion '" + std::string(name) + "'");
}

PerformanceMetric parse_metric(std::string_view name) {
  for (auto m : {PerformanceMetric::accuracy, PerformanceMetric::tpr, PerformanceMetric::tnr,
                 PerformanceMetric::fpr, PerformanceMetric::fnr,
                 PerformanceMetric::positive_rate}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown performance metric '" + std::string(name) + "'");
}

PerformanceMetric statistic_of(FairnessCriterion c) {
  switch (c) {
    case FairnessCriterion::demographic_parity: return PerformanceMetric::positive_rate;
    case FairnessCriterion::equal_opportunity: return PerformanceMetric::tpr;
    case FairnessCriterion::equal_accuracy: return PerformanceMetric::accuracy;
  }
  throw ArgumentError("unknown fairness criterion");
}

std::optional<double> metric_value(const Confusion& c, PerformanceMetric m) {
  switch (m) {
    case PerformanceMetric::accuracy: return c.accuracy();
    case PerformanceMetric::tpr: return c.tpr();
    case PerformanceMetric::tnr: return c.tnr();
    case PerformanceMetric::fpr: return c.fpr();
    case PerformanceMetric::fnr: return c.fnr();
    case PerformanceMetric::positive_rate: return c.positive_rate();
  }
  return std::nullopt;
}

std::size_t DisparityMatrix::flag_count() const { return flagged_pairs().size(); }

std::vector<std::pair<std::size_t, std::size_t>> DisparityMatrix::flagged_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    for (std::size_t j = i + 1; j < flags.size(); ++j) {
      if (flags[i][j]) out.emplace_back(i, j);
    }
  }
  return out;
}

DisparityMatrix disparity_matrix(std::string criterion, double tolerance,
                                 std::vector<std::string> groups,
                                 std::vector<std::optional<double>> statistics) {
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be >= 0");
  if (groups.size() != statistics.size()) throw ArgumentError("one statistic per group expected");
  const std::size_t g = groups.size();
  DisparityMatrix m;
  m.criterion = std::move(criterion);
  m.tolerance = tolerance;
  m.groups = std::move(groups);
  m.statistics = std::move(statistics);
  m.values.assign(g, std::vector<double>(g, 0.0));
  m.flags.assign(g, std::vector<bool>(g, false));
  m.undefined.assign(g, std::vector<bool>(g, false));
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (!m.statistics[i] || !m.statistics[j]) {
        m.undefined[i][j] = true;
        continue;
      }
      if (i == j) continue;
      const double v = std::abs(*m.statistics[i] - *m.statistics[j]);
      m.values[i][j] = v;
      m.flags[i][j] = v > tolerance;
    }
  }
  return m;
}

std::vector<Confusion> group_confusions(const GroupPartition& partition,
                                        std::span<const std::string> y_true,
                                        std::span<const std::string> y_pred,
                                        std::string_view positive_class) {
  if (y_true.size() != y_pred.size()) throw ArgumentError("y_true and y_pred differ in length");
  std::vector<Confusion> out;
  std::vector<std::string> t, p;
  for (const auto& g : partition.groups) {
    t.clear();
    p.clear();
    for (auto r : g.rows) {
      if (r >= y_true.size()) throw ArgumentError("partition does not cover the label vectors");
      t.push_back(y_true[r]);
      p.push_back(y_pred[r]);
    }
    out.push_back(confusion(t, p, positive_class));
  }
  return out;
}

DisparityMatrix performance_disparity(const GroupPartition& partition,
                                      std::span<const std::string> y_true,
                                      std::span<const std::string> y_pred,
                                      PerformanceMetric metric, std::string_view positive_class,
                                      double tolerance) {
  const auto conf = group_confusions(partition, y_true, y_pred, positive_class);
  std::vector<std::string> labels;
  std::vector<std::optional<double>> stats;
  for (std::size_t g = 0; g < conf.size(); ++g) {
    labels.push_back(partition.groups[g].label);
    stats.push_back(metric_value(conf[g], metric));
  }
  return disparity_matrix(std::string(to_string(metric)), tolerance, std::move(labels),
                          std::move(stats));
}

DisparityMatrix group_fairness(const GroupPartition& partition,
                               std::span<const std::string> y_true,
                               std::span<const std::string> y_pred,
                               FairnessCriterion criterion, std::string_view positive_class,
                               double tolerance) {
  auto m = performance_disparity(partition, y_true, y_pred, statistic_of(criterion),
                                 positive_class, tolerance);
  m.criterion = std::string(to_string(criterion));
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> systemic_bias(
    const Dataset& dataset, std::span<const std::string> protected_features) {
  if (protected_features.empty()) throw ArgumentError("systemic bias needs protected features");
  const auto& schema = dataset.schema();
  std::vector<bool> is_protected(schema.size(), false);
  for (auto i : schema.require_indices(protected_features)) is_protected[i] = true;
  std::vector<std::size_t> other, prot;
  for (std::size_t c = 0; c < schema.size(); ++c) (is_protected[c] ? prot : other).push_back(c);
  if (other.empty()) {
    throw ArgumentError("protected features cover every column; nothing to compare on");
  }

  std::map<std::vector<double>, std::vector<std::size_t>> buckets;
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    std::vector<double> key;
    key.reserve(other.size());
    for (auto c : other) key.push_back(dataset.features()(r, c));
    buckets[std::move(key)].push_back(r);
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [key, rows] : buckets) {
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = a + 1; b < rows.size(); ++b) {
        const auto i = rows[a], j = rows[b];
        if (dataset.label(i) == dataset.label(j)) continue;
        const bool differs = std::any_of(prot.begin(), prot.end(), [&](std::size_t c) {
          return dataset.features()(i, c) != dataset.features()(j, c);
        });
        if (differs) out.emplace_back(i, j);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Candidate {
  double threshold;
  double statistic;
  std::size_t correct;
};

// Candidates for one group, ascending by threshold.
std::vector<Candidate> group_candidates(std::span<const double> scores,
                                        std::span<const std::string> y_true,
                                        const Group& group, FairnessCriterion criterion,
                                        std::string_view positive_class) {
  const std::size_t n = group.rows.size();
  std::size_t positives = 0;
  for (auto r : group.rows) positives += y_true[r] == positive_class ? 1 : 0;
  if (criterion == FairnessCriterion::equal_opportunity && positives == 0) {
    throw FitError("equal_opportunity is undefined for group '" + group.label +
                   "': it has no positive examples");
  }

  std::vector<std::size_t> order(group.rows);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });

  // Sweep thresholds from +inf downwards; everything with score >= t is positive.
  std::vector<Candidate> out;
  std::size_t pred_pos = 0, tp = 0;
  auto push = [&](double t) {
    const std::size_t fp = pred_pos - tp;
    const std::size_t tn = (n - positives) - fp;
    const std::size_t correct = tp + tn;
    double stat = 0.0;
    switch (criterion) {
      case FairnessCriterion::demographic_parity:
        stat = static_cast<double>(pred_pos) / static_cast<double>(n);
        break;
      case FairnessCriterion::equal_opportunity:
        stat = static_cast<double>(tp) / static_cast<double>(positives);
        break;
      case FairnessCriterion::equal_accuracy:
        stat = static_cast<double>(correct) / static_cast<double>(n);
        break;
    }
    out.push_back({t, stat, correct});
  };
  push(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      ++pred_pos;
      tp += y_true[order[i]] == positive_class ? 1 : 0;
      ++i;
    }
    push(t);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Best candidate (most correct, then smallest threshold) among those whose
// statistic lies in [lo, lo + slack], via a sparse table over stat order.
class RangeBest {
 public:
  RangeBest() = default;
  explicit RangeBest(const std::vector<Candidate>& cands) : cands_(&cands) {
    order_.resize(cands.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return cands[a].statistic < cands[b].statistic ||
             (cands[a].statistic == cands[b].statistic && a < b);
    });
    for (auto i : order_) stats_.push_back(cands[i].statistic);
    table_.push_back(order_);
    for (std::size_t w = 1; 2 * w <= order_.size(); w *= 2) {
      const auto& prev = table_.back();
      std::vector<std::size_t> next(order_.size() - 2 * w + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = better(prev[i], prev[i + w]);
      table_.push_back(std::move(next));
    }
  }

  std::optional<std::size_t> query(double lo, double slack) const {
    const auto b = std::partition_point(stats_.begin(), stats_.end(),
                                        [&](double s) { return s < lo; });
    const auto e = std::partition_point(b, stats_.end(),
                                        [&](double s) { return s - lo <= slack; });
    if (b == e) return std::nullopt;
    const auto i = static_cast<std::size_t>(b - stats_.begin());
    const auto len = static_cast<std::size_t>(e - b);
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= len) ++level;
    const std::size_t w = std::size_t{1} << level;
    return better(table_[level][i], table_[level][i + len - w]);
  }

 private:
  // Candidates are ascending by threshold, so a lower index is a smaller one.
  std::size_t better(std::size_t a, std::size_t b) const {
    const auto ca = (*cands_)[a].correct, cb = (*cands_)[b].correct;
    if (ca != cb) return ca > cb ? a : b;
    return std::min(a, b);
  }

  const std::vector<Candidate>* cands_ = nullptr;
  std::vector<std::size_t> order_;
  std::vector<double> stats_;
  std::vector<std::vector<std::size_t>> table_;
};

}  // namespace

ThresholdAssignment fit_group_thresholds(std::span<const double> scores,
                                         const GroupPartition& partition,
                                         std::span<const std::string> y_true,
                                         FairnessCriterion criterion,
                                         std::string_view positive_class, double tolerance) {
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be >= 0");
  if (scores.size() != y_true.size()) throw ArgumentError("one score per label expected");
  if (partition.groups.empty()) throw ArgumentError("threshold fitting needs at least one group");
  for (double s : scores) {
    if (!std::isfinite(s)) throw ArgumentError("scores must be finite");
  }
  const std::size_t g_count = partition.groups.size();
  std::vector<std::vector<Candidate>> cands;
  for (const auto& g : partition.groups) {
    if (g.rows.empty()) throw ArgumentError("group '" + g.label + "' is empty");
    for (auto r : g.rows) {
      if (r >= scores.size()) throw ArgumentError("partition does not cover the scores");
    }
    cands.push_back(group_candidates(scores, y_true, g, criterion, positive_class));
  }

  std::vector<std::size_t> best_pick;
  if (g_count == 1) {
    // No gap to close: take the statistic's argmax.
    std::size_t b = 0;
    const auto& c = cands[0];
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].statistic > c[b].statistic ||
          (c[i].statistic == c[b].statistic && c[i].correct > c[b].correct)) {
        b = i;
      }
    }
    best_pick = {b};
  }

  // Smallest range of statistic values containing one candidate per group.
  struct Item {
    double stat;
    std::size_t group;
  };
  std::vector<Item> items;
  for (std::size_t g = 0; g < g_count; ++g) {
    for (const auto& c : cands[g]) items.push_back({c.statistic, g});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.stat < b.stat || (a.stat == b.stat && a.group < b.group);
  });
  std::vector<std::size_t> in_window(g_count, 0);
  std::size_t covered = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t lo = 0, hi = 0; lo < items.size(); ++lo) {
    while (hi < items.size() && covered < g_count) {
      if (in_window[items[hi].group]++ == 0) ++covered;
      ++hi;
    }
    if (covered < g_count) break;
    best_gap = std::min(best_gap, items[hi - 1].stat - items[lo].stat);
    if (--in_window[items[lo].group] == 0) --covered;
  }
  const double slack = best_gap + 1e-12;

  // Every optimal assignment has its minimum at some candidate statistic.
  std::vector<double> lows;
  for (const auto& it : items) lows.push_back(it.stat);
  lows.erase(std::unique(lows.begin(), lows.end()), lows.end());

  std::vector<RangeBest> best_in(g_count);
  for (std::size_t g = 0; g < g_count; ++g) best_in[g] = RangeBest(cands[g]);

  std::size_t best_correct = 0;
  std::vector<double> best_thresholds;
  std::vector<std::size_t> pick(g_count);
  for (double lo : g_count == 1 ? std::vector<double>{} : lows) {
    bool feasible = true;
    std::size_t correct = 0;
    for (std::size_t g = 0; g < g_count && feasible; ++g) {
      const auto chosen = best_in[g].query(lo, slack);
      if (!chosen) {
        feasible = false;
      } else {
        pick[g] = *chosen;
        correct += cands[g][*chosen].correct;
      }
    }
    if (!feasible) continue;
    std::vector<double> thresholds(g_count);
    for (std::size_t g = 0; g < g_count; ++g) thresholds[g] = cands[g][pick[g]].threshold;
    if (best_pick.empty() || correct > best_correct ||
        (correct == best_correct && thresholds < best_thresholds)) {
      best_pick = pick;
      best_correct = correct;
      best_thresholds = std::move(thresholds);
    }
  }

  ThresholdAssignment out;
  out.criterion = std::string(to_string(criterion));
  out.tolerance = tolerance;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < g_count; ++g) {
    const auto& c = cands[g][best_pick[g]];
    out.groups.push_back(partition.groups[g].label);
    out.thresholds.push_back(c.threshold);
    out.achieved.push_back(c.statistic);
    out.accuracy.push_back(static_cast<double>(c.correct) /
                           static_cast<double>(partition.groups[g].rows.size()));
    mn = std::min(mn, c.statistic);
    mx = std::max(mx, c.statistic);
  }
  out.max_gap = mx - mn;
  out.within_tolerance = out.max_gap <= tolerance;
  return out;
}

}  // namespace fatkit
