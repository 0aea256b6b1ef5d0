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
#include <limits>
#include <random>
#include <set>

#include "fatkit/csv.hpp"
#include "fatkit/errors.hpp"
#include "fatkit/fairness.hpp"
#include "fatkit/grouping.hpp"
#include "support/fixtures.hpp"

namespace fatkit {
namespace {

using testing::categorical;
using testing::make_dataset;
using testing::numeric;

const Dataset& adult() {
  static const Dataset ds = load_csv(FATKIT_DATA_DIR "/adult.csv", std::nullopt, "income");
  return ds;
}

GroupPartition manual_partition(const std::vector<std::size_t>& sizes) {
  GroupPartition p;
  p.feature = "g";
  std::size_t next = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    Group grp;
    grp.label = "g" + std::to_string(g);
    for (std::size_t i = 0; i < sizes[g]; ++i) grp.rows.push_back(next++);
    p.groups.push_back(grp);
  }
  return p;
}

TEST(Grouping, ThresholdBins) {
  const auto ds = make_dataset({numeric("v", 10, 60)}, {{10.0}, {30.0}, {60.0}}, {"0", "1", "0"});
  const auto p = partition(ds, "v", std::vector<double>{25, 50});
  ASSERT_EQ(p.groups.size(), 3u);
  EXPECT_EQ(p.groups[0].rows, std::vector<std::size_t>{0});
  EXPECT_EQ(p.groups[1].rows, std::vector<std::size_t>{1});
  EXPECT_EQ(p.groups[2].rows, std::vector<std::size_t>{2});
  EXPECT_EQ(p.total_rows(), 3u);
}

TEST(Grouping, RightClosedBoundary) {
  const auto ds = make_dataset({numeric("v", 0, 50)}, {{25.0}, {25.5}}, {"0", "1"});
  const auto p = partition(ds, "v", std::vector<double>{25});
  EXPECT_EQ(p.groups[0].rows, std::vector<std::size_t>{0});
  EXPECT_EQ(p.groups[1].rows, std::vector<std::size_t>{1});
}

TEST(Grouping, Errors) {
  const auto ds = make_dataset({numeric("v", 0, 1), categorical("c", {"a"})},
                               {{0.0, std::string("a")}}, {"0"});
  EXPECT_THROW(partition(ds, "c", std::vector<double>{1}), ArgumentError);
  EXPECT_THROW(partition(ds, "nope"), SchemaError);
  EXPECT_THROW(partition(ds, "v", std::vector<double>{2, 1}), ArgumentError);
}

TEST(Grouping, ConstantFeatureSingleGroup) {
  const auto ds = make_dataset({categorical("c", {"a"})},
                               {{std::string("a")}, {std::string("a")}}, {"0", "1"});
  const auto p = partition(ds, "c");
  ASSERT_EQ(p.groups.size(), 1u);
  EXPECT_EQ(p.groups[0].count(), 2u);
}

TEST(Representation, BalancedAndSmallGroups) {
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> labels;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({std::string(i < 90 ? "a" : "b")});
    labels.push_back(i % 2 == 0 ? "0" : "1");
  }
  const auto ds = make_dataset({categorical("c", {"a", "b"})}, rows, labels);
  const auto rec = representation_audit(partition(ds, "c"), ds.labels(), 0.2);
  EXPECT_FALSE(rec[0].sampling_bias);
  EXPECT_TRUE(rec[1].sampling_bias);
  EXPECT_FALSE(rec[0].class_imbalance);
  EXPECT_THROW(representation_audit(GroupPartition{}, ds.labels()), ArgumentError);
}

TEST(Representation, AdultRace) {
  const auto p = partition(adult(), "race");
  std::set<std::string> labels;
  for (const auto& g : p.groups) labels.insert(g.label);
  EXPECT_EQ(labels, (std::set<std::string>{"White", "Black", "Other", "Amer-Indian-Eskimo",
                                           "Asian-Pac-Islander"}));
  const auto rec = representation_audit(p, adult().labels());
  auto skew = [&](const std::string& label) {
    for (const auto& r : rec) {
      if (r.label == label) {
        double hi = 0, lo = 1;
        for (const auto& [c, v] : r.class_distribution) {
          hi = std::max(hi, v);
          lo = std::min(lo, v);
        }
        return hi - lo;
      }
    }
    return -1.0;
  };
  // Black and Amer-Indian-Eskimo are more lopsided than the White and
  // Asian-Pac-Islander groups.
  for (const char* strong : {"Black", "Amer-Indian-Eskimo"}) {
    for (const char* weak : {"White", "Asian-Pac-Islander"}) {
      EXPECT_GT(skew(strong), skew(weak)) << strong << " vs " << weak;
    }
  }
}

TEST(Confusion, HandCount) {
  const std::vector<std::string> t = {"1", "1", "0", "0"}, p = {"1", "0", "0", "1"};
  const auto c = confusion(t, p, "1");
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(*c.accuracy(), 0.5);
  EXPECT_EQ(*c.tpr(), 0.5);
  EXPECT_EQ(*c.tnr(), 0.5);
}

TEST(Confusion, IdentityAndEmpty) {
  const std::vector<std::string> t = {"1", "0", "1"};
  const auto c = confusion(t, t, "1");
  EXPECT_EQ(*c.accuracy(), 1.0);
  EXPECT_EQ(c.fp + c.fn, 0u);
  const auto e = confusion({}, {}, "1");
  EXPECT_EQ(e.total(), 0u);
  EXPECT_FALSE(e.accuracy());
  EXPECT_FALSE(e.tpr());
  EXPECT_FALSE(e.tnr());
  EXPECT_FALSE(e.positive_rate());
  EXPECT_THROW(confusion(t, std::vector<std::string>{"1"}, "1"), ArgumentError);
}

TEST(GroupFairness, DemographicParityGap) {
  const auto p = manual_partition({4, 4});
  const std::vector<std::string> y = {"1", "0", "1", "0", "1", "0", "1", "0"};
  const std::vector<std::string> yhat = {"1", "1", "0", "0", "1", "0", "0", "0"};
  const auto m = group_fairness(p, y, yhat, FairnessCriterion::demographic_parity, "1", 0.2);
  EXPECT_EQ(m.values[0][1], 0.25);
  EXPECT_TRUE(m.flags[0][1]);
  EXPECT_TRUE(m.flags[1][0]);
  EXPECT_EQ(m.flag_count(), 1u);
  const auto n = group_fairness(p, y, yhat, FairnessCriterion::demographic_parity, "1", 0.3);
  EXPECT_EQ(n.flag_count(), 0u);
  const auto same = group_fairness(p, y, y, FairnessCriterion::equal_accuracy, "1", 0.0);
  EXPECT_EQ(same.flag_count(), 0u);
  EXPECT_EQ(same.values[0][1], 0.0);
  EXPECT_THROW(parse_criterion("calibration"), ArgumentError);
}

TEST(DisparityMatrix, TnrFlags) {
  const auto m = disparity_matrix("tnr", 0.2, {"a", "b", "c"}, {1.0, 0.9, 0.5});
  EXPECT_EQ(m.flagged_pairs(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 2}}));
}

TEST(DisparityMatrix, UndefinedNeverFlags) {
  const auto m = disparity_matrix("tpr", 0.0, {"a", "b"}, {std::nullopt, 0.9});
  EXPECT_TRUE(m.undefined[0][1]);
  EXPECT_FALSE(m.flags[0][1]);
  EXPECT_EQ(m.values[0][1], 0.0);
}

// Property: symmetric, zero diagonal, flags iff value > tolerance, values in [0, 1].
TEST(DisparityMatrix, Invariants) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t g = 1 + trial % 6;
    std::vector<std::string> names;
    std::vector<std::optional<double>> s;
    for (std::size_t i = 0; i < g; ++i) {
      names.push_back("g" + std::to_string(i));
      s.push_back(u(rng) < 0.1 ? std::nullopt : std::optional<double>(u(rng)));
    }
    const double tol = u(rng) * 0.5;
    const auto m = disparity_matrix("x", tol, names, s);
    for (std::size_t i = 0; i < g; ++i) {
      EXPECT_EQ(m.values[i][i], 0.0);
      EXPECT_FALSE(m.flags[i][i]);
      for (std::size_t j = 0; j < g; ++j) {
        EXPECT_EQ(m.values[i][j], m.values[j][i]);
        EXPECT_EQ(m.flags[i][j], m.flags[j][i]);
        EXPECT_GE(m.values[i][j], 0.0);
        EXPECT_LE(m.values[i][j], 1.0);
        EXPECT_EQ(m.flags[i][j], !m.undefined[i][j] && m.values[i][j] > tol);
      }
    }
  }
  EXPECT_THROW(disparity_matrix("x", -0.1, {"a"}, {0.5}), ArgumentError);
}

TEST(SystemicBias, Examples) {
  const std::vector<Column> cols = {numeric("age", 0, 100), categorical("sex", {"M", "F"})};
  const auto ds = make_dataset(cols, {{30.0, std::string("M")}, {30.0, std::string("F")}},
                               {"0", "1"}, {"sex"});
  const std::vector<std::string> prot = {"sex"};
  EXPECT_EQ(systemic_bias(ds, prot), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));

  const auto same = make_dataset(cols, {{30.0, std::string("M")}, {30.0, std::string("F")}},
                                 {"1", "1"}, {"sex"});
  EXPECT_TRUE(systemic_bias(same, prot).empty());
  const auto distinct = make_dataset(cols, {{30.0, std::string("M")}, {31.0, std::string("F")}},
                                     {"0", "1"}, {"sex"});
  EXPECT_TRUE(systemic_bias(distinct, prot).empty());
  const std::vector<std::string> all = {"age", "sex"};
  EXPECT_THROW(systemic_bias(ds, all), ArgumentError);
}

TEST(SystemicBias, MatchesPairScan) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    auto base = testing::random_dataset(rng, 40, 1, 2);
    // Squash the numeric column onto few values so collisions happen.
    RowMatrix x = base.features();
    for (std::size_t r = 0; r < x.rows(); ++r) x(r, 0) = std::fmod(x(r, 0), 2.0);
    Dataset ds(base.schema(), x, base.labels());
    const std::vector<std::string> prot = {"c1"};
    const auto p = ds.schema().require_index("c1");
    std::vector<std::pair<std::size_t, std::size_t>> oracle;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      for (std::size_t j = i + 1; j < ds.rows(); ++j) {
        bool same_rest = true;
        for (std::size_t c = 0; c < ds.cols(); ++c) {
          if (c != p && ds.row(i)[c] != ds.row(j)[c]) same_rest = false;
        }
        if (same_rest && ds.row(i)[p] != ds.row(j)[p] && ds.label(i) != ds.label(j)) {
          oracle.emplace_back(i, j);
        }
      }
    }
    EXPECT_EQ(systemic_bias(ds, prot), oracle);
  }
}

TEST(Thresholds, HandExample) {
  const auto p = manual_partition({2, 2});
  const std::vector<double> scores = {0.1, 0.9, 0.4, 0.6};
  const std::vector<std::string> y = {"0", "1", "0", "1"};
  const auto a = fit_group_thresholds(scores, p, y, FairnessCriterion::demographic_parity, "1");
  EXPECT_EQ(a.thresholds, (std::vector<double>{0.9, 0.6}));
  EXPECT_EQ(a.achieved, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(a.max_gap, 0.0);
  EXPECT_TRUE(a.within_tolerance);
}

TEST(Thresholds, IdenticalGroups) {
  const auto p = manual_partition({3, 3});
  const std::vector<double> scores = {0.2, 0.5, 0.7, 0.2, 0.5, 0.7};
  const std::vector<std::string> y = {"0", "1", "1", "0", "1", "1"};
  const auto a = fit_group_thresholds(scores, p, y, FairnessCriterion::equal_opportunity, "1");
  EXPECT_EQ(a.thresholds[0], a.thresholds[1]);
  EXPECT_EQ(a.max_gap, 0.0);
}

TEST(Thresholds, SingleGroupMaximizesStatistic) {
  const auto p = manual_partition({3});
  const std::vector<double> scores = {0.2, 0.5, 0.7};
  const std::vector<std::string> y = {"0", "1", "0"};
  const auto dp = fit_group_thresholds(scores, p, y, FairnessCriterion::demographic_parity, "1");
  EXPECT_EQ(dp.thresholds[0], 0.2);
  EXPECT_EQ(dp.achieved[0], 1.0);
  const auto ea = fit_group_thresholds(scores, p, y, FairnessCriterion::equal_accuracy, "1");
  EXPECT_EQ(ea.thresholds[0], 0.5);
}

TEST(Thresholds, Errors) {
  const auto p = manual_partition({2, 2});
  const std::vector<double> scores = {0.1, 0.9, 0.4, 0.6};
  const std::vector<std::string> y = {"0", "1", "0", "0"};
  try {
    fit_group_thresholds(scores, p, y, FairnessCriterion::equal_opportunity, "1");
    FAIL();
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("'g1'"), std::string::npos);
  }
  const std::vector<double> bad = {0.1, NAN, 0.4, 0.6};
  EXPECT_THROW(fit_group_thresholds(bad, p, y, FairnessCriterion::demographic_parity, "1"),
               ArgumentError);
}

// Exhaustive search over every threshold combination.
ThresholdAssignment brute_thresholds(std::span<const double> scores, const GroupPartition& p,
                                     std::span<const std::string> y, FairnessCriterion c) {
  const std::size_t G = p.groups.size();
  std::vector<std::vector<double>> cands(G);
  for (std::size_t g = 0; g < G; ++g) {
    for (auto r : p.groups[g].rows) cands[g].push_back(scores[r]);
    cands[g].push_back(std::numeric_limits<double>::infinity());
    std::sort(cands[g].begin(), cands[g].end());
    cands[g].erase(std::unique(cands[g].begin(), cands[g].end()), cands[g].end());
  }
  auto eval = [&](std::size_t g, double t, double& stat, std::size_t& correct) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (auto r : p.groups[g].rows) {
      const bool pred = scores[r] >= t, truth = y[r] == "1";
      tp += pred && truth;
      fp += pred && !truth;
      tn += !pred && !truth;
      fn += !pred && truth;
    }
    const double n = static_cast<double>(p.groups[g].rows.size());
    correct = tp + tn;
    switch (c) {
      case FairnessCriterion::demographic_parity: stat = static_cast<double>(tp + fp) / n; break;
      case FairnessCriterion::equal_opportunity:
        stat = static_cast<double>(tp) / static_cast<double>(tp + fn);
        break;
      case FairnessCriterion::equal_accuracy: stat = static_cast<double>(correct) / n; break;
    }
  };
  struct Option {
    double gap;
    std::size_t correct;
    std::vector<double> thresholds;
    std::vector<double> stats;
  };
  std::vector<Option> all;
  std::vector<std::size_t> idx(G, 0);
  while (true) {
    Option o{0, 0, {}, {}};
    double lo = 1e9, hi = -1e9;
    for (std::size_t g = 0; g < G; ++g) {
      double s;
      std::size_t k;
      eval(g, cands[g][idx[g]], s, k);
      o.thresholds.push_back(cands[g][idx[g]]);
      o.stats.push_back(s);
      o.correct += k;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    o.gap = hi - lo;
    all.push_back(o);
    std::size_t g = 0;
    while (g < G && ++idx[g] == cands[g].size()) idx[g++] = 0;
    if (g == G) break;
  }
  double best_gap = 1e9;
  for (const auto& o : all) best_gap = std::min(best_gap, o.gap);
  const Option* best = nullptr;
  for (const auto& o : all) {
    if (o.gap > best_gap + 1e-12) continue;
    if (!best || o.correct > best->correct ||
        (o.correct == best->correct && o.thresholds < best->thresholds)) {
      best = &o;
    }
  }
  ThresholdAssignment out;
  out.thresholds = best->thresholds;
  out.achieved = best->stats;
  out.max_gap = best->gap;
  return out;
}

TEST(Thresholds, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> score(0, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t G = 2 + trial % 2;
    std::vector<std::size_t> sizes;
    for (std::size_t g = 0; g < G; ++g) sizes.push_back(1 + rng() % 6);
    const auto p = manual_partition(sizes);
    const std::size_t n = p.total_rows();
    std::vector<double> s(n);
    std::vector<std::string> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = score(rng) / 10.0;
      y[i] = rng() % 2 ? "1" : "0";
    }
    for (std::size_t g = 0; g < G; ++g) y[p.groups[g].rows[0]] = "1";
    for (auto c : {FairnessCriterion::demographic_parity, FairnessCriterion::equal_opportunity,
                   FairnessCriterion::equal_accuracy}) {
      const auto got = fit_group_thresholds(s, p, y, c, "1", 0.1);
      const auto want = brute_thresholds(s, p, y, c);
      EXPECT_EQ(got.thresholds, want.thresholds) << "trial " << trial;
      EXPECT_EQ(got.achieved, want.achieved);
      EXPECT_EQ(got.max_gap, want.max_gap);
      EXPECT_EQ(got.within_tolerance, got.max_gap <= 0.1);
    }
  }
}

}  // namespace
}  // namespace fatkit
