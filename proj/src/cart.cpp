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

#include "fatkit/cart.hpp"

#include <algorithm>
#include <numeric>

#include "fatkit/errors.hpp"

namespace fatkit {

std::string_view to_string(PredicateOp op) {
  switch (op) {
    case PredicateOp::less_equal: return "<=";
    case PredicateOp::greater: return ">";
    case PredicateOp::equal: return "==";
    case PredicateOp::not_equal: return "!=";
  }
  return "?";
}

bool Predicate::holds(std::span<const double> row) const {
  const double v = row[feature];
  switch (op) {
    case PredicateOp::less_equal: return v <= value;
    case PredicateOp::greater: return v > value;
    case PredicateOp::equal: return v == value;
    case PredicateOp::not_equal: return v != value;
  }
  return false;
}

namespace {

// n * gini for class weights summing to n.
double weighted_impurity(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  return total - sq / total;
}

struct Split {
  bool found = false;
  std::size_t feature = 0;
  bool categorical = false;
  double threshold = 0.0;
  double gain = 0.0;
};

class Builder {
 public:
  Builder(const RowMatrix& x, std::span<const FeatureKind> kinds,
          std::span<const std::size_t> labels, std::size_t n_classes,
          std::span<const double> weights, const CartParams& params)
      : x_(x), kinds_(kinds), labels_(labels), k_(n_classes), w_(weights), params_(params) {}

  void build(std::vector<CartTree::Node>& nodes, std::vector<double>& gain) {
    nodes_ = &nodes;
    gain_ = &gain;
    gain.assign(x_.cols(), 0.0);
    std::vector<std::size_t> idx(x_.rows());
    std::iota(idx.begin(), idx.end(), 0);
    nodes.emplace_back();
    grow(0, idx, 0);
  }

 private:
  double weight(std::size_t r) const { return w_.empty() ? 1.0 : w_[r]; }

  void grow(std::size_t node_id, std::vector<std::size_t>& idx, int depth) {
    std::vector<double> counts(k_, 0.0);
    double total = 0.0;
    for (auto r : idx) {
      counts[labels_[r]] += weight(r);
      total += weight(r);
    }
    {
      auto& node = (*nodes_)[node_id];
      node.weight = total;
      node.distribution = counts;
      if (total > 0.0) {
        for (auto& c : node.distribution) c /= total;
      }
    }
    const double impurity = weighted_impurity(counts, total);
    const bool pure = impurity <= 1e-12 * std::max(1.0, total);
    if (depth >= params_.max_depth || pure || idx.size() < 2 * params_.min_samples_leaf) return;

    const Split split = best_split(idx, counts, total, impurity);
    if (!split.found) return;

    std::vector<std::size_t> left, right;
    for (auto r : idx) {
      const double v = x_(r, split.feature);
      const bool go_left = split.categorical ? v == split.threshold : v <= split.threshold;
      (go_left ? left : right).push_back(r);
    }
    idx.clear();
    idx.shrink_to_fit();

    (*gain_)[split.feature] += split.gain;
    const std::size_t left_id = nodes_->size();
    nodes_->emplace_back();
    const std::size_t right_id = nodes_->size();
    nodes_->emplace_back();
    {
      auto& node = (*nodes_)[node_id];
      node.feature = split.feature;
      node.categorical = split.categorical;
      node.threshold = split.threshold;
      node.left = left_id;
      node.right = right_id;
    }
    grow(left_id, left, depth + 1);
    grow(right_id, right, depth + 1);
  }

  void consider(Split& best, std::size_t feature, bool categorical, double threshold,
                double gain) const {
    // Strictly better only, so earlier features and thresholds win ties.
    if (!best.found || gain > best.gain + 1e-12) {
      best = Split{true, feature, categorical, threshold, gain};
    }
  }

  Split best_split(const std::vector<std::size_t>& idx, const std::vector<double>& counts,
                   double total, double impurity) const {
    Split best;
    const std::size_t n = idx.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    std::vector<std::size_t> order(idx);
    std::vector<double> left(k_), right(k_);

    for (std::size_t f = 0; f < x_.cols(); ++f) {
      if (kinds_[f] == FeatureKind::numeric) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          const double va = x_(a, f), vb = x_(b, f);
          return va < vb || (va == vb && a < b);
        });
        std::fill(left.begin(), left.end(), 0.0);
        double wl = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const auto r = order[i];
          left[labels_[r]] += weight(r);
          wl += weight(r);
          const double v = x_(r, f);
          const double next = x_(order[i + 1], f);
          if (!(v < next)) continue;
          if (i + 1 < min_leaf || n - i - 1 < min_leaf) continue;
          const double wr = total - wl;
          if (wl <= 0.0 || wr <= 0.0) continue;
          for (std::size_t k = 0; k < k_; ++k) right[k] = counts[k] - left[k];
          const double gain =
              impurity - weighted_impurity(left, wl) - weighted_impurity(right, wr);
          double t = v + (next - v) / 2.0;
          if (!(t < next)) t = v;
          consider(best, f, false, t, gain);
        }
      } else {
        // Per-category class weights; categories visited in code order.
        std::vector<std::vector<double>> by_value;
        std::vector<std::size_t> n_value;
        for (auto r : idx) {
          const auto code = static_cast<std::size_t>(x_(r, f));
          if (code >= by_value.size()) {
            by_value.resize(code + 1, std::vector<double>(k_, 0.0));
            n_value.resize(code + 1, 0);
          }
          by_value[code][labels_[r]] += weight(r);
          ++n_value[code];
        }
        for (std::size_t code = 0; code < by_value.size(); ++code) {
          if (n_value[code] < min_leaf || n - n_value[code] < min_leaf) continue;
          double wl = 0.0;
          for (double c : by_value[code]) wl += c;
          const double wr = total - wl;
          if (wl <= 0.0 || wr <= 0.0) continue;
          for (std::size_t k = 0; k < k_; ++k) right[k] = counts[k] - by_value[code][k];
          const double gain =
              impurity - weighted_impurity(by_value[code], wl) - weighted_impurity(right, wr);
          consider(best, f, true, static_cast<double>(code), gain);
        }
      }
    }
    return best;
  }

  const RowMatrix& x_;
  std::span<const FeatureKind> kinds_;
  std::span<const std::size_t> labels_;
  std::size_t k_;
  std::span<const double> w_;
  CartParams params_;
  std::vector<CartTree::Node>* nodes_ = nullptr;
  std::vector<double>* gain_ = nullptr;
};

}  // namespace

CartTree CartTree::fit(const RowMatrix& x, std::span<const FeatureKind> kinds,
                       std::span<const std::size_t> labels, std::size_t n_classes,
                       std::span<const double> weights, const CartParams& params) {
  if (kinds.size() != x.cols()) throw ArgumentError("cart: feature kinds do not match columns");
  if (labels.size() != x.rows()) throw ArgumentError("cart: label count does not match rows");
  if (!weights.empty() && weights.size() != x.rows()) {
    throw ArgumentError("cart: weight count does not match rows");
  }
  if (x.rows() == 0) throw ArgumentError("cart: no training rows");
  if (n_classes == 0) throw ArgumentError("cart: no classes");
  if (params.max_depth < 0) throw ArgumentError("cart: negative max depth");
  double total = 0.0;
  for (auto l : labels) {
    if (l >= n_classes) throw ArgumentError("cart: label index out of range");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw ArgumentError("cart: weights must be non-negative");
    total += w;
  }
  if (!weights.empty() && total <= 0.0) throw ArgumentError("cart: all weights are zero");

  CartTree tree;
  tree.n_features_ = x.cols();
  tree.n_classes_ = n_classes;
  Builder(x, kinds, labels, n_classes, weights, params).build(tree.nodes_, tree.gain_);
  return tree;
}

std::size_t CartTree::leaf_index(std::span<const double> row) const {
  if (row.size() != n_features_) throw ArgumentError("cart: row width mismatch");
  std::size_t id = 0;
  while (!nodes_[id].leaf()) {
    const auto& n = nodes_[id];
    const double v = row[n.feature];
    const bool go_left = n.categorical ? v == n.threshold : v <= n.threshold;
    id = go_left ? n.left : n.right;
  }
  return id;
}

std::span<const double> CartTree::distribution(std::span<const double> row) const {
  return nodes_[leaf_index(row)].distribution;
}

std::size_t CartTree::predict(std::span<const double> row) const {
  const auto d = distribution(row);
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

std::vector<Predicate> CartTree::path(std::span<const double> row) const {
  if (row.size() != n_features_) throw ArgumentError("cart: row width mismatch");
  std::vector<Predicate> out;
  std::size_t id = 0;
  while (!nodes_[id].leaf()) {
    const auto& n = nodes_[id];
    const double v = row[n.feature];
    if (n.categorical) {
      const bool eq = v == n.threshold;
      out.push_back({n.feature, eq ? PredicateOp::equal : PredicateOp::not_equal, n.threshold});
      id = eq ? n.left : n.right;
    } else {
      const bool le = v <= n.threshold;
      out.push_back({n.feature, le ? PredicateOp::less_equal : PredicateOp::greater, n.threshold});
      id = le ? n.left : n.right;
    }
  }
  return out;
}

std::vector<double> CartTree::importances() const {
  std::vector<double> out = gain_;
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : out) v /= sum;
    return out;
  }
  // Only zero-gain splits: share importance by split count.
  std::fill(out.begin(), out.end(), 0.0);
  double splits = 0.0;
  for (const auto& n : nodes_) {
    if (n.leaf()) continue;
    out[n.feature] += 1.0;
    splits += 1.0;
  }
  if (splits > 0.0) {
    for (auto& v : out) v /= splits;
  }
  return out;
}

std::size_t CartTree::leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

int CartTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].leaf()) continue;
    d[nodes_[i].left] = d[i] + 1;
    d[nodes_[i].right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

}  // namespace fatkit
