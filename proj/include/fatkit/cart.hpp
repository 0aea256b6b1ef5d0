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
#include <span>
#include <string>
#include <vector>

#include "fatkit/tabular.hpp"

namespace fatkit {

// Weighted CART classifier on Gini impurity. Numeric features split as
// `x <= t` with t the midpoint between consecutive distinct sorted values;
// categorical features split one-vs-rest as `x == v`.
struct CartParams {
  int max_depth = 4;
  std::size_t min_samples_leaf = 1;
};

enum class PredicateOp { less_equal, greater, equal, not_equal };

std::string_view to_string(PredicateOp op);

struct Predicate {
  std::size_t feature = 0;
  PredicateOp op = PredicateOp::less_equal;
  double value = 0.0;

  bool holds(std::span<const double> row) const;
  bool operator==(const Predicate&) const = default;
};

class CartTree {
 public:
  struct Node {
    // Leaf when left == right == 0.
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double weight = 0.0;
    std::vector<double> distribution;  // normalized class weights at the node
    bool leaf() const noexcept { return left == 0 && right == 0; }
  };

  // `labels` are class indices in [0, n_classes). `weights` may be empty
  // (uniform). Throws ArgumentError on shape mismatch or all-zero weights.
  static CartTree fit(const RowMatrix& x, std::span<const FeatureKind> kinds,
                      std::span<const std::size_t> labels, std::size_t n_classes,
                      std::span<const double> weights, const CartParams& params);

  std::size_t leaf_index(std::span<const double> row) const;
  std::span<const double> distribution(std::span<const double> row) const;
  // Argmax of the leaf distribution, ties to the lowest class index.
  std::size_t predict(std::span<const double> row) const;
  // Predicates along the root-to-leaf path followed by `row`.
  std::vector<Predicate> path(std::span<const double> row) const;
  // Weighted Gini decrease per feature, normalized to sum 1 (all zeros for a
  // single leaf).
  std::vector<double> importances() const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaves() const;
  int depth() const;
  std::size_t features() const noexcept { return n_features_; }
  std::size_t classes() const noexcept { return n_classes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<double> gain_;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
};

}  // namespace fatkit
