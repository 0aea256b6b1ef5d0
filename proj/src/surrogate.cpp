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

#include "fatkit/surrogate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "fatkit/errors.hpp"
#include "fatkit/grouping.hpp"
#include "fatkit/kernels/kernels.hpp"

namespace fatkit {

std::string_view to_string(Locality locality) {
  return locality == Locality::global ? "global" : "local";
}

namespace {

struct ColumnStats {
  std::vector<double> sd;                      // numeric: population sd
  std::vector<std::vector<double>> frequency;  // categorical: code counts
};

ColumnStats column_stats(const Dataset& dataset) {
  const auto& schema = dataset.schema();
  ColumnStats s;
  s.sd.assign(schema.size(), 0.0);
  s.frequency.resize(schema.size());
  const std::size_t n = dataset.rows();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema.column(c);
    if (col.numeric()) {
      if (n == 0) continue;
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += dataset.features()(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = dataset.features()(r, c) - mean;
        var += d * d;
      }
      s.sd[c] = std::sqrt(var / static_cast<double>(n));
    } else {
      s.frequency[c].assign(col.values.size(), 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        s.frequency[c][static_cast<std::size_t>(dataset.features()(r, c))] += 1.0;
      }
    }
  }
  return s;
}

void draw_around(const FeatureSchema& schema, const ColumnStats& stats,
                 std::span<const double> centre, double scale, std::mt19937_64& rng,
                 std::span<double> out) {
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema.column(c);
    if (col.numeric()) {
      const double spread = scale * stats.sd[c];
      if (spread > 0.0) {
        std::normal_distribution<double> normal(centre[c], spread);
        out[c] = std::clamp(normal(rng), col.min, col.max);
      } else {
        out[c] = centre[c];
      }
    } else {
      const auto& f = stats.frequency[c];
      const bool any = std::any_of(f.begin(), f.end(), [](double v) { return v > 0.0; });
      if (!any) {
        out[c] = centre[c];
        continue;
      }
      std::discrete_distribution<std::size_t> pick(f.begin(), f.end());
      out[c] = static_cast<double>(pick(rng));
    }
  }
}

void check_sampler(std::size_t n, double scale) {
  if (n < 2) throw ArgumentError("sample size must be >= 2");
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ArgumentError("scale must be >= 0");
}

}  // namespace

RowMatrix sample_normal(const Dataset& dataset, std::span<const double> centre, std::size_t n,
                        double scale, std::uint64_t seed) {
  check_sampler(n, scale);
  const auto& schema = dataset.schema();
  if (centre.size() != schema.size()) throw SchemaError("sampling centre does not match schema");
  const auto stats = column_stats(dataset);
  std::mt19937_64 rng(seed);
  RowMatrix out(n, schema.size());
  for (std::size_t i = 0; i < n; ++i) draw_around(schema, stats, centre, scale, rng, out.row(i));
  return out;
}

RowMatrix sample_normal_global(const Dataset& dataset, std::size_t n, double scale,
                               std::uint64_t seed) {
  check_sampler(n, scale);
  if (dataset.rows() == 0) throw ArgumentError("global sampling needs dataset rows");
  const auto& schema = dataset.schema();
  const auto stats = column_stats(dataset);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.rows() - 1);
  RowMatrix out(n, schema.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = pick(rng);
    draw_around(schema, stats, dataset.row(r), scale, rng, out.row(i));
  }
  return out;
}

MixupSample sample_mixup(const Dataset& dataset, std::span<const double> instance,
                         std::string_view instance_label, std::size_t n, double alpha,
                         std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw ArgumentError("mixup sample size must be even and >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("mixup alpha must be > 0");
  const auto& schema = dataset.schema();
  if (instance.size() != schema.size()) throw SchemaError("mixup instance does not match schema");
  MixupSample out;
  out.classes = dataset.classes();
  if (out.classes.size() < 2) throw ArgumentError("mixup needs a dataset with >= 2 classes");
  const auto own = std::find(out.classes.begin(), out.classes.end(), instance_label);
  if (own == out.classes.end()) {
    throw ArgumentError("instance label '" + std::string(instance_label) +
                        "' does not occur in the dataset");
  }
  const auto own_index = static_cast<std::size_t>(own - out.classes.begin());

  std::vector<std::size_t> same, other;
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    (dataset.label(r) == instance_label ? same : other).push_back(r);
  }
  std::map<std::string, std::size_t> class_index;
  for (std::size_t k = 0; k < out.classes.size(); ++k) class_index[out.classes[k]] = k;

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.rows = RowMatrix(n, schema.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pool = i < n / 2 ? same : other;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const auto partner = pool[pick(rng)];
    const double g1 = gamma(rng);
    const double g2 = gamma(rng);
    const double lambda = g1 + g2 > 0.0 ? g1 / (g1 + g2) : 0.5;
    auto row = out.rows.row(i);
    const auto p = dataset.row(partner);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (schema.column(c).numeric()) {
        row[c] = lambda * instance[c] + (1.0 - lambda) * p[c];
      } else {
        row[c] = unit(rng) < lambda ? instance[c] : p[c];
      }
    }
    std::vector<double> soft(out.classes.size(), 0.0);
    soft[own_index] += lambda;
    soft[class_index.at(dataset.label(partner))] += 1.0 - lambda;
    out.soft_labels.push_back(std::move(soft));
    out.mix.push_back(lambda);
    out.partners.push_back(partner);
  }
  return out;
}

RowMatrix discretize(const Dataset& dataset, const RowMatrix& rows,
                     std::span<const double> instance) {
  const auto& schema = dataset.schema();
  if (instance.size() != schema.size() || rows.cols() != schema.size()) {
    throw SchemaError("discretize: width does not match schema");
  }
  std::vector<std::vector<double>> bins(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema.column(c).numeric() && dataset.rows() > 0) {
      bins[c] = quartile_thresholds(dataset, schema.column(c).name);
    }
  }
  auto bin = [&](std::size_t c, double v) {
    return std::lower_bound(bins[c].begin(), bins[c].end(), v) - bins[c].begin();
  };
  RowMatrix out(rows.rows(), schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const bool numeric = schema.column(c).numeric();
    const auto home = numeric ? bin(c, instance[c]) : 0;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const double v = rows(r, c);
      const bool same = numeric ? bin(c, v) == home : v == instance[c];
      out(r, c) = same ? 1.0 : 0.0;
    }
  }
  return out;
}

std::vector<double> kernel_weights(const RowMatrix& rows, std::span<const double> instance,
                                   const FeatureSchema& schema, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw ArgumentError("kernel width must be > 0");
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const double d = mixed_distance(rows.row(r), instance, schema);
    out[r] = std::exp(-(d * d) / (width * width));
  }
  return out;
}

double LinearFit::predict(std::span<const double> x) const {
  double s = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * x[j];
  return s;
}

LinearFit fit_ridge(const RowMatrix& x, std::span<const double> targets,
                    std::span<const double> weights, double lambda) {
  const std::size_t n = x.rows(), p = x.cols();
  if (n < 2) throw ArgumentError("ridge needs at least 2 rows");
  if (targets.size() != n || weights.size() != n) {
    throw ArgumentError("ridge: targets and weights must have one entry per row");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("ridge lambda must be >= 0");
  double sw = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("ridge weights must be >= 0");
    sw += w;
  }
  if (!(sw > 0.0)) throw ArgumentError("ridge weights are all zero");

  std::vector<double> xbar(p, 0.0);
  double ybar = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) xbar[j] += weights[r] * x(r, j);
    ybar += weights[r] * targets[r];
  }
  for (auto& v : xbar) v /= sw;
  ybar /= sw;

  LinearFit fit;
  fit.weights.assign(p, 0.0);
  if (p == 0) {
    fit.intercept = ybar;
    return fit;
  }
  std::vector<double> xc(n * p), yc(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) xc[r * p + j] = x(r, j) - xbar[j];
    yc[r] = targets[r] - ybar;
  }
  std::vector<double> gram(p * p, 0.0), rhs(p, 0.0);
  kernels::weighted_gram(xc, n, p, weights, gram);
  kernels::weighted_xty(xc, n, p, weights, yc, rhs);

  Eigen::MatrixXd a(p, p);
  Eigen::VectorXd b(p);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) a(i, j) = gram[i * p + j];
    a(i, i) += lambda;
    b(i) = rhs[i];
    max_diag = std::max(max_diag, a(i, i));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  bool singular = llt.info() != Eigen::Success;
  if (!singular) {
    const Eigen::MatrixXd l = llt.matrixL();
    for (std::size_t i = 0; i < p; ++i) {
      if (l(i, i) * l(i, i) <= 1e-12 * std::max(1.0, max_diag)) singular = true;
    }
  }
  if (singular) {
    throw FitError("ridge system is singular; use lambda > 0");
  }
  const Eigen::VectorXd beta = llt.solve(b);
  double intercept = ybar;
  for (std::size_t j = 0; j < p; ++j) {
    fit.weights[j] = beta(j);
    intercept -= xbar[j] * beta(j);
  }
  fit.intercept = intercept;
  return fit;
}

namespace {

RowMatrix columns_of(const RowMatrix& x, std::span<const std::size_t> cols) {
  RowMatrix out(x.rows(), cols.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t k = 0; k < cols.size(); ++k) out(r, k) = x(r, cols[k]);
  }
  return out;
}

double weighted_sse(const RowMatrix& x, const LinearFit& fit, std::span<const double> y,
                    std::span<const double> w) {
  double s = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double e = y[r] - fit.predict(x.row(r));
    s += w[r] * e * e;
  }
  return s;
}

}  // namespace

FeatureSelection select_features(const RowMatrix& x, std::span<const double> targets,
                                 std::span<const double> weights, std::size_t m, double lambda) {
  const std::size_t p = x.cols();
  if (m < 1 || m > p) {
    throw ArgumentError("feature selection size must be between 1 and " + std::to_string(p));
  }
  FeatureSelection out;
  bool constant = true;
  for (std::size_t j = 0; j < p && constant; ++j) {
    for (std::size_t r = 1; r < x.rows() && constant; ++r) constant = x(r, j) == x(0, j);
  }
  if (constant) {
    out.features.resize(m);
    std::iota(out.features.begin(), out.features.end(), 0);
    out.diagnostic = "every column is constant; selected the first " + std::to_string(m);
    return out;
  }
  if (m == p) {
    out.features.resize(p);
    std::iota(out.features.begin(), out.features.end(), 0);
    return out;
  }
  std::vector<bool> taken(p, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::optional<std::size_t> best;
    double best_sse = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      if (taken[c]) continue;
      auto cols = out.features;
      cols.insert(std::upper_bound(cols.begin(), cols.end(), c), c);
      const auto sub = columns_of(x, cols);
      double sse;
      try {
        sse = weighted_sse(sub, fit_ridge(sub, targets, weights, lambda), targets, weights);
      } catch (const FitError&) {
        continue;
      }
      if (!best || sse < best_sse - 1e-12 * std::max(1.0, std::abs(best_sse))) {
        best = c;
        best_sse = sse;
      }
    }
    if (!best) {
      for (std::size_t c = 0; c < p && !best; ++c) {
        if (!taken[c]) best = c;
      }
      out.diagnostic = "no candidate column gave a solvable fit; filled by index";
    }
    taken[*best] = true;
    out.features.insert(std::upper_bound(out.features.begin(), out.features.end(), *best), *best);
  }
  return out;
}

SampleSet default_sample(const Model& model, const Dataset& dataset,
                         std::span<const double> instance, const SurrogateConfig& config) {
  SampleSet out;
  if (const auto* normal = std::get_if<NormalSampler>(&config.sampler)) {
    if (config.locality == Locality::global) {
      out.rows = sample_normal_global(dataset, normal->n, normal->scale, config.seed);
    } else {
      if (instance.empty()) throw ArgumentError("local sampling needs an instance");
      out.rows = sample_normal(dataset, instance, normal->n, normal->scale, config.seed);
    }
    return out;
  }
  const auto& mix = std::get<MixupSampler>(config.sampler);
  if (instance.empty()) throw ArgumentError("mixup sampling needs an instance");
  const auto label = model.predict_one(instance).predictions.at(0);
  auto m = sample_mixup(dataset, instance, label, mix.n, mix.alpha, config.seed);
  out.rows = std::move(m.rows);
  const auto& classes = model.classes();
  std::vector<std::vector<double>> soft;
  for (const auto& s : m.soft_labels) {
    std::vector<double> row(classes.size(), 0.0);
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
      const auto it = std::find(classes.begin(), classes.end(), m.classes[k]);
      if (it != classes.end()) row[static_cast<std::size_t>(it - classes.begin())] += s[k];
    }
    soft.push_back(std::move(row));
  }
  out.soft_labels = std::move(soft);
  return out;
}

namespace {

// Surrogate input space: interpretable binary encoding, or raw features.
struct Representation {
  bool interpretable = false;
  std::vector<FeatureKind> kinds;
  std::vector<double> reference;  // raw mode: categorical value encoded as 1

  RowMatrix apply(const Dataset& dataset, const RowMatrix& rows, std::span<const double> instance,
                  bool for_tree) const {
    if (interpretable) return discretize(dataset, rows, instance);
    RowMatrix out = rows;
    if (!for_tree) {
      const auto& schema = dataset.schema();
      for (std::size_t c = 0; c < schema.size(); ++c) {
        if (!schema.column(c).categorical()) continue;
        for (std::size_t r = 0; r < out.rows(); ++r) out(r, c) = rows(r, c) == reference[c];
      }
    }
    return out;
  }
};

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw RemoteModelError("model predicted unknown class '" + label + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace

SurrogateExplanation explain(const Model& model, const Dataset& dataset,
                             std::optional<std::span<const double>> instance,
                             const SurrogateConfig& config, const Sampler& sampler) {
  if (!model.fitted()) throw StateError("surrogate explanation needs a fitted model");
  const auto& schema = dataset.schema();
  if (instance && instance->size() != schema.size()) {
    throw SchemaError("instance does not match schema");
  }
  if (config.locality == Locality::local && !instance) {
    throw ArgumentError("local explanations need an instance");
  }
  if (config.top_m && (*config.top_m < 1 || *config.top_m > schema.size())) {
    throw ArgumentError("top_m must be between 1 and the number of features");
  }
  if (config.kernel_width && !(*config.kernel_width > 0.0)) {
    throw ArgumentError("kernel width must be > 0");
  }
  const auto& classes = model.classes();
  const std::span<const double> inst = instance ? *instance : std::span<const double>{};
  const bool is_tree = std::holds_alternative<TreeSurrogate>(config.surrogate);

  SurrogateExplanation ex;
  ex.kind = is_tree ? "tree" : "ridge";
  ex.locality = config.locality;

  // b) sample
  SampleSet sample =
      sampler ? sampler(dataset, inst, config) : default_sample(model, dataset, inst, config);
  const auto& rows = sample.rows;
  if (rows.rows() < 2 || rows.cols() != schema.size()) {
    throw ArgumentError("surrogate sample must have >= 2 rows of the schema's width");
  }
  if (sample.soft_labels &&
      (sample.soft_labels->size() != rows.rows() ||
       std::any_of(sample.soft_labels->begin(), sample.soft_labels->end(),
                   [&](const auto& s) { return s.size() != classes.size(); }))) {
    throw ArgumentError("soft labels must cover every sample row and model class");
  }
  ex.sample_size = rows.rows();

  // c) label
  const PredictionBatch bb =
      model.supports_proba() ? model.predict_proba(rows) : model.predict(rows);
  std::vector<std::size_t> bb_index(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) bb_index[r] = class_index(classes, bb.predictions[r]);

  std::size_t explained;
  if (instance) {
    explained = class_index(classes, model.predict_one(inst).predictions.at(0));
  } else {
    std::vector<std::size_t> count(classes.size(), 0);
    for (auto k : bb_index) ++count[k];
    explained = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) -
                                         count.begin());
  }
  ex.explained_class = classes[explained];
  if (std::all_of(bb_index.begin(), bb_index.end(),
                  [&](std::size_t k) { return k == bb_index[0]; })) {
    ex.diagnostics.push_back("black box predicted a single class on the sample; fidelity is "
                             "not informative");
  }

  // a) representation
  Representation rep;
  rep.interpretable = config.interpretable && instance.has_value();
  if (config.interpretable && !instance) {
    ex.diagnostics.push_back("interpretable representation needs an instance; using raw features");
  }
  ex.interpretable = rep.interpretable;
  if (!rep.interpretable) {
    rep.reference.assign(schema.size(), 0.0);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& col = schema.column(c);
      if (!col.categorical()) continue;
      if (instance) {
        rep.reference[c] = inst[c];
      } else {
        std::vector<std::size_t> count(col.values.size(), 0);
        for (std::size_t r = 0; r < dataset.rows(); ++r) {
          ++count[static_cast<std::size_t>(dataset.features()(r, c))];
        }
        if (!count.empty()) {
          rep.reference[c] = static_cast<double>(std::max_element(count.begin(), count.end()) -
                                                 count.begin());
        }
      }
    }
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const bool cat = !rep.interpretable && is_tree && schema.column(c).categorical();
    rep.kinds.push_back(cat ? FeatureKind::categorical : FeatureKind::numeric);
  }
  const RowMatrix x_full = rep.apply(dataset, rows, inst, is_tree);

  // Targets: soft label or probability of the explained class for ridge,
  // hard labels for trees.
  std::vector<double> y(rows.rows());
  std::vector<std::size_t> hard(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    if (sample.soft_labels) {
      const auto& s = (*sample.soft_labels)[r];
      y[r] = s[explained];
      hard[r] = argmax(s);
    } else {
      y[r] = bb.probabilities ? (*bb.probabilities)[r][explained]
                              : (bb_index[r] == explained ? 1.0 : 0.0);
      hard[r] = bb_index[r];
    }
  }

  // d) weight and select
  std::vector<double> w(rows.rows(), 1.0);
  if (config.kernel_width && instance) w = kernel_weights(rows, inst, schema, *config.kernel_width);
  double sw = 0.0;
  for (double v : w) sw += v;
  if (!(sw > 0.0)) throw FitError("every sample weight underflowed to zero; widen the kernel");

  std::vector<std::size_t> selected(schema.size());
  std::iota(selected.begin(), selected.end(), 0);
  const double lambda =
      is_tree ? RidgeSurrogate{}.lambda : std::get<RidgeSurrogate>(config.surrogate).lambda;
  if (config.top_m) {
    std::vector<double> sel_target(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      sel_target[r] = is_tree ? (hard[r] == explained ? 1.0 : 0.0) : y[r];
    }
    RowMatrix x_sel = is_tree ? rep.apply(dataset, rows, inst, false) : x_full;
    auto sel = select_features(x_sel, sel_target, w, *config.top_m, lambda);
    selected = sel.features;
    if (sel.diagnostic) ex.diagnostics.push_back(*sel.diagnostic);
  }
  for (auto c : selected) ex.features.push_back(schema.column(c).name);
  const RowMatrix x = columns_of(x_full, selected);

  // e) fit, f) explain
  double agree = 0.0;
  if (is_tree) {
    std::vector<FeatureKind> kinds;
    for (auto c : selected) kinds.push_back(rep.kinds[c]);
    CartParams params;
    params.max_depth = std::get<TreeSurrogate>(config.surrogate).max_depth;
    auto tree = CartTree::fit(x, kinds, hard, classes.size(), w, params);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (tree.predict(x.row(r)) == bb_index[r]) agree += w[r];
    }
    ex.importances = tree.importances();
    if (instance) {
      RowMatrix one(schema.size());
      one.push_back(inst);
      const auto xi = columns_of(rep.apply(dataset, one, inst, true), selected);
      for (const auto& p : tree.path(xi.row(0))) {
        ex.rule.push_back({ex.features[p.feature], p.op, p.value});
      }
    }
    ex.tree = std::move(tree);
  } else {
    auto fit = fit_ridge(x, y, w, lambda);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const bool says = fit.predict(x.row(r)) >= 0.5;
      if (says == (bb_index[r] == explained)) agree += w[r];
    }
    ex.linear = std::move(fit);
  }
  ex.fidelity = std::clamp(agree / sw, 0.0, 1.0);
  return ex;
}

IcePd ice_pd(const Model& model, const Dataset& dataset, std::string_view feature,
             std::span<const double> grid, const std::optional<std::string>& positive_class) {
  if (!model.fitted()) throw StateError("ICE/PD needs a fitted model");
  const auto f = dataset.schema().require_index(feature);
  if (grid.empty()) throw ArgumentError("ICE/PD grid is empty");
  const auto& col = dataset.schema().column(f);
  for (double v : grid) {
    if (col.categorical()) {
      if (v < 0 || v != std::floor(v) || v >= static_cast<double>(col.values.size())) {
        throw ArgumentError("grid value is not a category of '" + col.name + "'");
      }
    } else if (!std::isfinite(v)) {
      throw ArgumentError("grid values must be finite");
    }
  }
  const auto& classes = model.classes();
  if (classes.empty()) throw StateError("model has no classes");
  const std::string target = positive_class.value_or(classes.back());
  const auto k = std::find(classes.begin(), classes.end(), target);
  if (k == classes.end()) throw ArgumentError("class '" + target + "' is not a model class");
  const auto ki = static_cast<std::size_t>(k - classes.begin());
  const bool proba = model.supports_proba();

  IcePd out;
  out.feature = col.name;
  out.grid.assign(grid.begin(), grid.end());
  out.quantity = (proba ? "probability of \"" : "indicator of predicted class \"") + target + "\"";
  const std::size_t n = dataset.rows();
  out.ice.assign(n, std::vector<double>(grid.size(), 0.0));
  out.pd.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    RowMatrix rows = dataset.features();
    for (std::size_t r = 0; r < n; ++r) rows(r, f) = grid[g];
    if (n == 0) continue;
    const auto batch = proba ? model.predict_proba(rows) : model.predict(rows);
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = proba ? (*batch.probabilities)[r][ki]
                             : (batch.predictions[r] == target ? 1.0 : 0.0);
      out.ice[r][g] = v;
      sum += v;
    }
    out.pd[g] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace fatkit
