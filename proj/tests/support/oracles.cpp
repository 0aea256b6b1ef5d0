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

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fatkit::oracle {

namespace {

double contribution(const Column& c, double a, double b) {
  if (c.categorical()) return a == b ? 0.0 : 1.0;
  const double range = c.max - c.min;
  if (range <= 0.0) return a == b ? 0.0 : 1.0;
  return std::min(std::abs(a - b) / range, 1.0);
}

}  // namespace

double gower(std::span<const double> a, std::span<const double> b, const FeatureSchema& schema) {
  double s = 0.0;
  for (std::size_t f = 0; f < schema.size(); ++f) s += contribution(schema.column(f), a[f], b[f]);
  return s / static_cast<double>(schema.size());
}

double nth_distance(const RowMatrix& reference, const FeatureSchema& schema,
                    std::span<const std::size_t> features, DensityMetric metric,
                    std::span<const double> query, std::size_t n,
                    std::optional<std::size_t> skip) {
  std::vector<double> d;
  for (std::size_t r = 0; r < reference.rows(); ++r) {
    if (skip && *skip == r) continue;
    double s = 0.0;
    for (auto f : features) {
      const auto& c = schema.column(f);
      const double a = query[f], b = reference(r, f);
      if (metric == DensityMetric::gower) {
        s += contribution(c, a, b);
      } else if (c.categorical()) {
        s += a == b ? 0.0 : 1.0;
      } else {
        s += (a - b) * (a - b);
      }
    }
    d.push_back(metric == DensityMetric::gower ? s / static_cast<double>(features.size())
                                               : std::sqrt(s));
  }
  std::sort(d.begin(), d.end());
  return d.at(n - 1);
}

double density_score(const Dataset& reference, const DensityOptions& options,
                     std::span<const double> query) {
  std::vector<std::size_t> features;
  if (options.features.empty()) {
    features.resize(reference.cols());
    std::iota(features.begin(), features.end(), 0);
  } else {
    for (const auto& name : options.features) {
      features.push_back(reference.schema().require_index(name));
    }
  }
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t r = 0; r < reference.rows(); ++r) {
    const double v = nth_distance(reference.features(), reference.schema(), features,
                                  options.metric, reference.row(r), options.neighbour, r);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double raw = nth_distance(reference.features(), reference.schema(), features,
                                  options.metric, query, options.neighbour);
  if (!(hi > lo)) return 0.0;
  return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<Foil> counterfactuals(const Model& model, const FeatureSchema& schema,
                                  std::span<const double> instance,
                                  const std::vector<std::size_t>& searchable,
                                  const std::vector<std::vector<double>>& grids, std::size_t k,
                                  CounterfactualMode mode,
                                  const std::optional<std::string>& target,
                                  const std::vector<std::size_t>& required, RequiredRule rule,
                                  std::size_t max_results) {
  const std::string original = model.predict_one(instance).predictions.at(0);
  // choice[j] = 0 keeps the instance value, i + 1 sets grids[j][i].
  std::vector<std::size_t> choice(searchable.size(), 0);
  std::vector<Foil> out;
  while (true) {
    std::vector<double> row(instance.begin(), instance.end());
    std::size_t changes = 0, hits = 0;
    bool valid = true;
    for (std::size_t j = 0; j < searchable.size(); ++j) {
      if (choice[j] == 0) continue;
      const double v = grids[j][choice[j] - 1];
      if (v == instance[searchable[j]]) valid = false;
      row[searchable[j]] = v;
      ++changes;
      if (std::find(required.begin(), required.end(), searchable[j]) != required.end()) ++hits;
    }
    const bool req_ok = rule == RequiredRule::all ? hits == required.size()
                                                  : (required.empty() || hits > 0);
    if (valid && changes >= 1 && changes <= k && req_ok) {
      const auto p = model.predict_one(row).predictions.at(0);
      const bool keep = mode == CounterfactualMode::implicit       ? p != original
                        : mode == CounterfactualMode::explicit_class ? p == *target
                                                                     : p == original;
      if (keep) {
        Foil f;
        f.row = row;
        f.predicted = p;
        f.distance = gower(instance, row, schema);
        std::vector<std::pair<std::string, std::size_t>> named;
        for (std::size_t j = 0; j < searchable.size(); ++j) {
          if (choice[j] != 0) named.emplace_back(schema.column(searchable[j]).name, choice[j] - 1);
        }
        std::sort(named.begin(), named.end());
        for (const auto& [n, pos] : named) {
          f.changed.push_back(n);
          f.positions.push_back(pos);
        }
        out.push_back(std::move(f));
      }
    }
    std::size_t j = 0;
    while (j < searchable.size() && ++choice[j] > grids[j].size()) choice[j++] = 0;
    if (j == searchable.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const Foil& a, const Foil& b) {
    if (a.changed.size() != b.changed.size()) return a.changed.size() < b.changed.size();
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.changed != b.changed) return a.changed < b.changed;
    return a.positions < b.positions;
  });
  if (out.size() > max_results) out.resize(max_results);
  return out;
}

std::optional<double> group_rate(const Group& group, std::span<const std::string> y_true,
                                 std::span<const std::string> y_pred,
                                 PerformanceMetric metric, const std::string& positive) {
  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (auto r : group.rows) {
    const bool t = y_true[r] == positive, p = y_pred[r] == positive;
    if (t && p) ++tp;
    if (!t && p) ++fp;
    if (!t && !p) ++tn;
    if (t && !p) ++fn;
  }
  auto ratio = [](double a, double b) -> std::optional<double> {
    if (b == 0) return std::nullopt;
    return a / b;
  };
  switch (metric) {
    case PerformanceMetric::accuracy: return ratio(tp + tn, tp + fp + tn + fn);
    case PerformanceMetric::tpr: return ratio(tp, tp + fn);
    case PerformanceMetric::tnr: return ratio(tn, tn + fp);
    case PerformanceMetric::fpr: return ratio(fp, tn + fp);
    case PerformanceMetric::fnr: return ratio(fn, tp + fn);
    case PerformanceMetric::positive_rate: return ratio(tp + fp, tp + fp + tn + fn);
  }
  return std::nullopt;
}

}  // namespace fatkit::oracle

namespace fatkit::oracle {

std::vector<double> ridge_gradient_descent(const RowMatrix& x, std::span<const double> y,
                                           std::span<const double> w, double lambda,
                                           std::size_t max_iterations) {
  const std::size_t n = x.rows(), p = x.cols();
  // Lipschitz bound from the trace of the augmented weighted Gram matrix.
  double trace = lambda * static_cast<double>(p);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 1.0;
    for (std::size_t j = 0; j < p; ++j) s += x(r, j) * x(r, j);
    trace += w[r] * s;
  }
  const double step = 1.0 / (2.0 * trace);
  std::vector<double> theta(p + 1, 0.0), grad(p + 1);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double f = theta[p];
      for (std::size_t j = 0; j < p; ++j) f += theta[j] * x(r, j);
      const double e = -2.0 * w[r] * (y[r] - f);
      for (std::size_t j = 0; j < p; ++j) grad[j] += e * x(r, j);
      grad[p] += e;
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) grad[j] += 2.0 * lambda * theta[j];
    for (std::size_t j = 0; j <= p; ++j) {
      theta[j] -= step * grad[j];
      norm += grad[j] * grad[j];
    }
    if (norm < 1e-22) break;
  }
  return theta;
}

}  // namespace fatkit::oracle
