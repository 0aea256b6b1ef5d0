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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fatkit/errors.hpp"
#include "fatkit/surrogate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fatkit {
namespace {

using testing::categorical;
using testing::make_dataset;
using testing::numeric;

Dataset small_mixed() {
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({static_cast<double>(i % 10), std::string(i % 3 == 0 ? "red" : "blue")});
    labels.push_back(i % 10 > 4 ? "1" : "0");
  }
  return make_dataset({numeric("x", 0, 9), categorical("c", {"red", "blue"})}, rows, labels);
}

TEST(Sampling, ZeroScaleKeepsInstance) {
  const auto ds = small_mixed();
  const auto s = sample_normal(ds, ds.row(3), 50, 0.0, 1);
  for (std::size_t r = 0; r < s.rows(); ++r) EXPECT_EQ(s(r, 0), ds.row(3)[0]);
}

TEST(Sampling, Deterministic) {
  const auto ds = small_mixed();
  EXPECT_EQ(sample_normal(ds, ds.row(0), 100, 1.0, 5), sample_normal(ds, ds.row(0), 100, 1.0, 5));
  EXPECT_NE(sample_normal(ds, ds.row(0), 100, 1.0, 5), sample_normal(ds, ds.row(0), 100, 1.0, 6));
  EXPECT_EQ(sample_normal_global(ds, 100, 1.0, 5), sample_normal_global(ds, 100, 1.0, 5));
}

TEST(Sampling, ClippedAndCentred) {
  // Wide range so clipping does not bias the mean.
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> labels;
  for (int i = 0; i < 20; ++i) {
    rows.push_back({static_cast<double>(i % 2)});
    labels.push_back("0");
  }
  rows.push_back({-100.0});
  rows.push_back({100.0});
  labels.resize(rows.size(), "0");
  const auto ds = make_dataset({numeric("x", -100, 100)}, rows, labels);
  const double centre = 0.5;
  const std::size_t n = 4000;
  const auto s = sample_normal(ds, std::span(&centre, 1), n, 0.1, 3);
  double mean = 0.0, lo = 1e9, hi = -1e9;
  for (std::size_t r = 0; r < n; ++r) {
    mean += s(r, 0);
    lo = std::min(lo, s(r, 0));
    hi = std::max(hi, s(r, 0));
  }
  mean /= static_cast<double>(n);
  double sd = 0.0, m = 0.0;
  for (std::size_t r = 0; r < ds.rows(); ++r) m += ds.row(r)[0];
  m /= static_cast<double>(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) sd += (ds.row(r)[0] - m) * (ds.row(r)[0] - m);
  sd = std::sqrt(sd / static_cast<double>(ds.rows()));
  const double se = 0.1 * sd / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(mean, centre, 3 * se * 1.05);
  EXPECT_GE(lo, -100);
  EXPECT_LE(hi, 100);
}

TEST(Mixup, ConvexCombination) {
  const auto ds = make_dataset({numeric("x", 0, 1)}, {{0.0}, {1.0}}, {"a", "b"});
  const double inst = 0.0;
  const auto s = sample_mixup(ds, std::span(&inst, 1), "a", 20, 1.0, 9);
  for (std::size_t i = 0; i < 20; ++i) {
    const double partner = ds.row(s.partners[i])[0];
    EXPECT_DOUBLE_EQ(s.rows(i, 0), s.mix[i] * inst + (1 - s.mix[i]) * partner);
  }
  // Hand value: lambda 0.3 between 0 and 1.
  EXPECT_DOUBLE_EQ(0.3 * 0.0 + 0.7 * 1.0, 0.7);
}

TEST(Mixup, LargeAlphaConcentratesAtMidpoint) {
  const auto ds = make_dataset({numeric("x", 0, 1)}, {{0.0}, {1.0}}, {"a", "b"});
  const double inst = 0.0;
  const auto s = sample_mixup(ds, std::span(&inst, 1), "a", 200, 1e6, 2);
  for (std::size_t i = 100; i < 200; ++i) EXPECT_NEAR(s.rows(i, 0), 0.5, 1e-2);
}

TEST(Mixup, OppositeClassPartners) {
  const auto ds = small_mixed();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_mixup(ds, ds.row(0), "0", 10, 1.0, seed);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(ds.label(s.partners[i]) == "0", i < 5);
      double sum = 0.0;
      for (double v : s.soft_labels[i]) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Mixup, Errors) {
  const auto ds = make_dataset({numeric("x", 0, 1)}, {{0.0}, {1.0}}, {"a", "a"});
  const double inst = 0.0;
  EXPECT_THROW(sample_mixup(ds, std::span(&inst, 1), "a", 10, 1.0, 1), ArgumentError);
  const auto two = make_dataset({numeric("x", 0, 1)}, {{0.0}, {1.0}}, {"a", "b"});
  EXPECT_THROW(sample_mixup(two, std::span(&inst, 1), "a", 9, 1.0, 1), ArgumentError);
}

TEST(Discretize, Examples) {
  const auto ds = make_dataset({numeric("v", 1, 4), categorical("c", {"red", "blue"})},
                               {{1.0, std::string("red")},
                                {2.0, std::string("blue")},
                                {3.0, std::string("red")},
                                {4.0, std::string("blue")}},
                               {"0", "0", "1", "1"});
  const auto d = discretize(ds, ds.features(), ds.row(0));
  EXPECT_EQ(d(0, 0), 1.0);
  EXPECT_EQ(d(1, 0), 0.0);
  EXPECT_EQ(d(3, 0), 0.0);
  EXPECT_EQ(d(0, 1), 1.0);
  EXPECT_EQ(d(1, 1), 0.0);
  EXPECT_EQ(d(2, 1), 1.0);
  RowMatrix self(2);
  self.push_back(ds.row(2));
  const auto one = discretize(ds, self, ds.row(2));
  EXPECT_EQ(one.data(), (std::vector<double>{1.0, 1.0}));
}

TEST(Kernel, Values) {
  FeatureSchema s({numeric("x", 0, 1)}, "y");
  RowMatrix rows(1, {0.0, 0.25});
  const double inst = 0.0;
  const auto w = kernel_weights(rows, std::span(&inst, 1), s, 0.25);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_NEAR(w[1], std::exp(-1.0), 1e-15);
}

TEST(Ridge, TwoPointLine) {
  RowMatrix x(1, {0.0, 1.0});
  const std::vector<double> y = {0, 1}, w = {1, 1};
  const auto f = fit_ridge(x, y, w, 0.0);
  EXPECT_NEAR(f.weights[0], 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);
}

TEST(Ridge, ConstantTargets) {
  RowMatrix x(2, {0, 1, 1, 0, 2, 2, 3, 1});
  const std::vector<double> y = {0.7, 0.7, 0.7, 0.7}, w = {1, 2, 1, 1};
  const auto f = fit_ridge(x, y, w, 1.0);
  EXPECT_NEAR(f.weights[0], 0.0, 1e-12);
  EXPECT_NEAR(f.weights[1], 0.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.7, 1e-12);
}

TEST(Ridge, SingularNeedsPenalty) {
  RowMatrix x(2, {1, 2, 2, 4, 3, 6});
  const std::vector<double> y = {1, 2, 3}, w = {1, 1, 1};
  try {
    fit_ridge(x, y, w, 0.0);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda > 0"), std::string::npos);
  }
  EXPECT_NO_THROW(fit_ridge(x, y, w, 0.1));
}

TEST(Ridge, MatchesGradientDescent) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 40, p = 3;
    RowMatrix x(n, p);
    std::vector<double> y(n), w(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < p; ++j) x(r, j) = z(rng);
      y[r] = 0.5 * x(r, 0) - x(r, 2) + 0.3 + 0.1 * z(rng);
      w[r] = u(rng);
    }
    const double lambda = 0.5 * trial;
    const auto f = fit_ridge(x, y, w, lambda);
    const auto g = oracle::ridge_gradient_descent(x, y, w, lambda);
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(f.weights[j], g[j], 1e-6);
    EXPECT_NEAR(f.intercept, g[p], 1e-6);
  }
}

TEST(Selection, Examples) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  const std::size_t n = 30;
  RowMatrix x(n, 3);
  std::vector<double> y(n), w(n, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < 3; ++j) x(r, j) = z(rng);
    y[r] = 2.0 * x(r, 2) - 1.0;
  }
  EXPECT_EQ(select_features(x, y, w, 1, 0.0).features, std::vector<std::size_t>{2});
  EXPECT_EQ(select_features(x, y, w, 3, 0.0).features, (std::vector<std::size_t>{0, 1, 2}));
  RowMatrix flat(n, 3, 1.0);
  const auto s = select_features(flat, y, w, 1, 1.0);
  EXPECT_EQ(s.features, std::vector<std::size_t>{0});
  EXPECT_TRUE(s.diagnostic);
}

TEST(TreeSurrogateFit, SingleSplit) {
  RowMatrix x(1, {0.0, 1.0});
  const std::vector<std::size_t> y = {0, 1};
  const FeatureKind kinds[] = {FeatureKind::numeric};
  const auto t = CartTree::fit(x, kinds, y, 2, {}, {1, 1});
  EXPECT_EQ(t.nodes()[0].threshold, 0.5);
  const std::vector<std::size_t> flat = {1, 1};
  EXPECT_EQ(CartTree::fit(x, kinds, flat, 2, {}, {1, 1}).leaves(), 1u);
}

TEST(Explain, ConstantBlackBoxTree) {
  const auto ds = small_mixed();
  const auto m = testing::constant_model("1");
  SurrogateConfig c;
  c.surrogate = TreeSurrogate{3};
  c.sampler = NormalSampler{200, 1.0};
  const auto ex = explain(m, ds, ds.row(0), c);
  ASSERT_TRUE(ex.tree);
  EXPECT_EQ(ex.tree->leaves(), 1u);
  EXPECT_EQ(ex.fidelity, 1.0);
  EXPECT_FALSE(ex.diagnostics.empty());
  EXPECT_TRUE(ex.rule.empty());
}

TEST(Explain, RidgeEqualsManualComposition) {
  const auto ds = small_mixed();
  const auto m = testing::threshold_model();
  SurrogateConfig c;
  c.sampler = NormalSampler{300, 1.0};
  c.seed = 77;
  const auto inst = ds.row(7);
  const auto ex = explain(m, ds, inst, c);
  const auto rows = sample_normal(ds, inst, 300, 1.0, 77);
  const auto x = discretize(ds, rows, inst);
  const auto w = kernel_weights(rows, inst, ds.schema(), 0.25);
  const auto bb = m.predict(rows);
  const std::string explained = m.predict_one(inst).predictions[0];
  std::vector<double> y;
  for (const auto& p : bb.predictions) y.push_back(p == explained ? 1.0 : 0.0);
  const auto f = fit_ridge(x, y, w, 1.0);
  ASSERT_TRUE(ex.linear);
  EXPECT_EQ(ex.linear->weights, f.weights);
  EXPECT_EQ(ex.linear->intercept, f.intercept);
  EXPECT_EQ(ex.explained_class, explained);
  EXPECT_EQ(ex.sample_size, 300u);
}

TEST(Explain, InjectedSamplerDrivesResult) {
  const auto ds = small_mixed();
  const auto m = testing::threshold_model();
  SurrogateConfig c;
  c.surrogate = TreeSurrogate{2};
  const auto fixed = sample_normal(ds, ds.row(0), 100, 1.0, 3);
  Sampler sampler = [&](const Dataset&, std::span<const double>, const SurrogateConfig&) {
    return SampleSet{fixed, std::nullopt};
  };
  const auto a = explain(m, ds, ds.row(0), c, sampler);
  c.seed = 999;  // ignored by the injected sampler
  const auto b = explain(m, ds, ds.row(0), c, sampler);
  EXPECT_EQ(a.fidelity, b.fidelity);
  EXPECT_EQ(a.importances, b.importances);
}

TEST(Explain, RuleHoldsForInstance) {
  const auto ds = testing::two_moons(300, 0.1, 5);
  DecisionTreeClassifier bb(6);
  bb.fit(ds);
  SurrogateConfig c;
  c.surrogate = TreeSurrogate{3};
  c.interpretable = false;
  const auto inst = ds.row(10);
  const auto ex = explain(bb, ds, inst, c);
  ASSERT_FALSE(ex.rule.empty());
  for (const auto& p : ex.rule) {
    const double v = inst[ds.schema().require_index(p.feature)];
    EXPECT_TRUE(p.op == PredicateOp::less_equal ? v <= p.value : v > p.value);
  }
}

TEST(Explain, GlobalHasNoRule) {
  const auto ds = small_mixed();
  const auto m = testing::threshold_model();
  SurrogateConfig c;
  c.locality = Locality::global;
  c.surrogate = TreeSurrogate{2};
  const auto ex = explain(m, ds, std::nullopt, c);
  EXPECT_TRUE(ex.rule.empty());
  EXPECT_FALSE(ex.interpretable);
  c.locality = Locality::local;
  EXPECT_THROW(explain(m, ds, std::nullopt, c), ArgumentError);
}

TEST(Explain, MixupSampler) {
  const auto ds = small_mixed();
  DecisionTreeClassifier bb(3);
  bb.fit(ds);
  SurrogateConfig c;
  c.sampler = MixupSampler{200, 1.0};
  const auto ex = explain(bb, ds, ds.row(2), c);
  EXPECT_EQ(ex.sample_size, 200u);
  EXPECT_GE(ex.fidelity, 0.0);
  EXPECT_LE(ex.fidelity, 1.0);
}

TEST(IcePd, ConstantModelIsFlat) {
  const auto ds = small_mixed();
  const auto m = testing::constant_model("1");
  const std::vector<double> grid = {0, 3, 9};
  const auto r = ice_pd(m, ds, "x", grid);
  for (const auto& row : r.ice) EXPECT_EQ(row, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(r.pd, (std::vector<double>{1, 1, 1}));
}

TEST(IcePd, IndicatorModel) {
  const auto ds = make_dataset({numeric("x", 0, 1), numeric("z", 0, 1)},
                               {{0.2, 0.1}, {0.9, 0.5}, {0.4, 0.4}}, {"0", "1", "0"});
  testing::FunctionModel m({"0", "1"},
                           [](std::span<const double> r) { return r[0] > 0.5 ? "1" : "0"; });
  const std::vector<double> grid = {0, 1};
  const auto r = ice_pd(m, ds, "x", grid);
  for (const auto& row : r.ice) EXPECT_EQ(row, (std::vector<double>{0, 1}));
  EXPECT_EQ(r.pd, (std::vector<double>{0, 1}));
  EXPECT_THROW(ice_pd(m, ds, "x", std::vector<double>{}), ArgumentError);
  EXPECT_THROW(ice_pd(m, ds, "x", grid, std::string("9")), ArgumentError);
}

TEST(IcePd, PdIsColumnMean) {
  const auto ds = testing::two_moons(120, 0.2, 3);
  LogisticRegression bb;
  bb.fit(ds);
  const std::vector<double> grid = {-1, -0.5, 0, 0.5, 1, 1.5, 2};
  const auto r = ice_pd(bb, ds, "x1", grid);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (const auto& row : r.ice) s += row[g];
    EXPECT_NEAR(r.pd[g], s / static_cast<double>(r.ice.size()), 1e-12);
  }
}

}  // namespace
}  // namespace fatkit
