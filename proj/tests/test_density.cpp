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

#include <algorithm>
#include <cmath>
#include <random>

#include "fatkit/density.hpp"
#include "fatkit/errors.hpp"
#include "support/fixtures.hpp"

namespace fatkit {
namespace {

using testing::make_dataset;
using testing::numeric;

Dataset line(const std::vector<double>& v) {
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> labels;
  for (double x : v) {
    rows.push_back({x});
    labels.push_back("0");
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return make_dataset({numeric("x", *lo, *hi)}, rows, labels);
}

TEST(Density, LineExample) {
  const auto est = DensityEstimator::fit(line({0, 1, 2, 10}), {.neighbour = 1});
  EXPECT_EQ(est.reference_raw(), (std::vector<double>{1, 1, 1, 8}));
  EXPECT_EQ(est.min_raw(), 1.0);
  EXPECT_EQ(est.max_raw(), 8.0);
  const double zero = 0.0, five = 5.0;
  EXPECT_EQ(est.raw_score(std::span(&zero, 1)), 0.0);
  EXPECT_EQ(est.score(std::span(&zero, 1)), 0.0);
  EXPECT_EQ(est.raw_score(std::span(&five, 1)), 3.0);
  EXPECT_NEAR(est.score(std::span(&five, 1)), 2.0 / 7.0, 1e-15);
}

TEST(Density, DegenerateReferences) {
  const auto est = DensityEstimator::fit(line({4, 4, 4}), {.neighbour = 1});
  EXPECT_EQ(est.reference_raw(), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(est.min_raw(), 0.0);
  EXPECT_EQ(est.max_raw(), 0.0);
  const double q = 100.0;
  EXPECT_EQ(est.score(std::span(&q, 1)), 0.0);
  const auto model = testing::constant_model("0");
  const auto c = prediction_confidence(est, model, std::span(&q, 1));
  EXPECT_TRUE(c.robust);
  EXPECT_EQ(c.density, 0.0);
}

TEST(Density, Errors) {
  EXPECT_THROW(DensityEstimator::fit(line({0, 1}), {.neighbour = 2}), ArgumentError);
  EXPECT_THROW(DensityEstimator::fit(line({0, 1}), {.neighbour = 0}), ArgumentError);
  EXPECT_THROW(parse_density_metric("cosine"), ArgumentError);
}

TEST(Density, ClusterCentroidIsRobust) {
  std::vector<double> v;
  for (int i = 0; i < 20; ++i) v.push_back(i * 0.01);
  v.push_back(50.0);
  const auto est = DensityEstimator::fit(line(v), {.neighbour = 3});
  const double centre = 0.1;
  const auto model = testing::constant_model("0");
  EXPECT_TRUE(prediction_confidence(est, model, std::span(&centre, 1)).robust);
  const double far = 49.0;
  EXPECT_FALSE(prediction_confidence(est, model, std::span(&far, 1)).robust);
}

TEST(Density, SparsePointsOrdering) {
  const std::vector<double> s = {0.6, 0.2, 0.9, 0.6, 0.5};
  const auto f = sparse_points(s, 0.5);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].row, 2u);
  EXPECT_EQ(f[1].row, 0u);
  EXPECT_EQ(f[2].row, 3u);
}

// Property: moving a query away from every reference never lowers its score.
TEST(Density, MonotoneAlongRay) {
  const auto est = DensityEstimator::fit(line({0, 1, 2, 3, 5, 8}), {.neighbour = 2});
  double prev = -1.0;
  for (double q = 8; q < 30; q += 0.5) {
    const double s = est.raw_score(std::span(&q, 1));
    EXPECT_GE(s, prev);
    prev = s;
  }
}

// Property: scores lie in [0, 1] and reference rows map to their normalized
// leave-one-out score.
TEST(Density, ScoresInUnitInterval) {
  std::mt19937_64 rng(4);
  const auto ds = testing::random_dataset(rng, 80, 2, 2);
  const auto est = DensityEstimator::fit(ds, {.neighbour = 4});
  for (double s : est.scores(ds.features())) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Density, FeatureSubsetAndGower) {
  std::mt19937_64 rng(8);
  const auto ds = testing::random_dataset(rng, 50, 2, 1);
  const auto est = DensityEstimator::fit(
      ds, {.neighbour = 3, .features = {"n1"}, .metric = DensityMetric::gower});
  EXPECT_EQ(est.features(), std::vector<std::string>{"n1"});
  const auto c0 = ds.schema().require_index("n1");
  std::vector<double> r(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < ds.rows(); ++j) {
      if (j != i) d.push_back(std::abs(ds.row(i)[c0] - ds.row(j)[c0]) / 9.0);
    }
    std::sort(d.begin(), d.end());
    EXPECT_DOUBLE_EQ(est.reference_raw()[i], d[2]);
  }
}

}  // namespace
}  // namespace fatkit
