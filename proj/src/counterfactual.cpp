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

#include "fatkit/counterfactual.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fatkit/errors.hpp"

namespace fatkit {

std::string_view to_string(CounterfactualMode mode) {
  switch (mode) {
    case CounterfactualMode::implicit: return "implicit";
    case CounterfactualMode::explicit_class: return "explicit";
    case CounterfactualMode::same_class: return "same_class";
  }
  return "?";
}

CounterfactualMode parse_counterfactual_mode(std::string_view name) {
  if (name == "implicit") return CounterfactualMode::implicit;
  if (name == "explicit") return CounterfactualMode::explicit_class;
  if (name == "same_class") return CounterfactualMode::same_class;
  throw ArgumentError("unknown counterfactual mode '" + std::string(name) + "'");
}

std::vector<double> default_grid(const Dataset& dataset, std::size_t feature) {
  const auto& col = dataset.schema().column(feature);
  std::vector<double> out;
  if (col.categorical()) {
    for (std::size_t c = 0; c < col.values.size(); ++c) out.push_back(static_cast<double>(c));
    return out;
  }
  if (dataset.rows() == 0) return out;
  std::vector<double> sorted(dataset.rows());
  for (std::size_t r = 0; r < dataset.rows(); ++r) sorted[r] = dataset.features()(r, feature);
  std::sort(sorted.begin(), sorted.end());
  for (int d = 1; d <= 10; ++d) {
    const double v = nearest_rank(sorted, d / 10.0);
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

namespace {

struct Candidate {
  std::vector<std::size_t> features;   // indices into searchable, ascending
  std::vector<std::size_t> positions;  // grid positions
};

struct RankKey {
  std::size_t size;
  double distance;
  std::vector<std::string_view> names;
  std::vector<std::size_t> positions;
};

bool key_less(const RankKey& a, const RankKey& b) {
  if (a.size != b.size) return a.size < b.size;
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.names != b.names) return a.names < b.names;
  return a.positions < b.positions;
}

RankKey key_of(const Counterfactual& cf) {
  std::vector<std::size_t> order(cf.changes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cf.changes[a].name < cf.changes[b].name; });
  RankKey k{cf.changes.size(), cf.distance, {}, {}};
  for (auto i : order) {
    k.names.push_back(cf.changes[i].name);
    k.positions.push_back(cf.grid_positions[i]);
  }
  return k;
}

bool satisfies(const CounterfactualConfig& config, const std::string& original,
               const std::string& predicted) {
  switch (config.mode) {
    case CounterfactualMode::implicit: return predicted != original;
    case CounterfactualMode::explicit_class: return predicted == *config.target_class;
    case CounterfactualMode::same_class: return predicted == original;
  }
  return false;
}

constexpr std::size_t kBatch = 4096;

// Odometer step over grid positions; false after the last combination.
bool advance(std::vector<std::size_t>& pos, const std::vector<std::size_t>& subset,
             const std::vector<std::vector<double>>& grids) {
  for (std::size_t j = pos.size(); j-- > 0;) {
    if (++pos[j] < grids[subset[j]].size()) return true;
    pos[j] = 0;
  }
  return false;
}

}  // namespace

CounterfactualSearch find_counterfactuals(const Model& model, const Dataset& dataset,
                                          std::span<const double> instance,
                                          const CounterfactualConfig& config) {
  if (!model.fitted()) throw StateError("counterfactual search needs a fitted model");
  const auto& schema = dataset.schema();
  if (instance.size() != schema.size()) {
    throw SchemaError("instance has " + std::to_string(instance.size()) + " features, schema has " +
                      std::to_string(schema.size()));
  }
  if (config.max_changes < 1) throw ArgumentError("max_changes must be >= 1");
  if (config.max_results < 1) throw ArgumentError("max_results must be >= 1");
  if (config.mode == CounterfactualMode::explicit_class) {
    if (!config.target_class) throw ArgumentError("explicit mode needs a target class");
    const auto& cls = model.classes();
    if (std::find(cls.begin(), cls.end(), *config.target_class) == cls.end()) {
      throw ArgumentError("target class '" + *config.target_class + "' is not a model class");
    }
  }

  std::vector<std::size_t> searchable;
  if (config.searchable) {
    if (config.searchable->empty()) throw ArgumentError("searchable feature set is empty");
    searchable = schema.require_indices(*config.searchable);
    std::sort(searchable.begin(), searchable.end());
    searchable.erase(std::unique(searchable.begin(), searchable.end()), searchable.end());
  } else {
    searchable.resize(schema.size());
    std::iota(searchable.begin(), searchable.end(), 0);
  }
  if (searchable.empty()) throw ArgumentError("searchable feature set is empty");
  for (const auto& [name, grid] : config.grids) schema.require_index(name);

  std::vector<bool> required(schema.size(), false);
  std::size_t n_required = 0;
  for (auto r : schema.require_indices(config.required)) {
    if (std::find(searchable.begin(), searchable.end(), r) == searchable.end()) {
      throw ArgumentError("required feature '" + schema.column(r).name + "' is not searchable");
    }
    if (!required[r]) ++n_required;
    required[r] = true;
  }
  const std::size_t k = std::min(config.max_changes, searchable.size());
  if (config.required_rule == RequiredRule::all && n_required > k) {
    throw ArgumentError("more required features than max_changes allows");
  }

  CounterfactualSearch out;
  out.max_changes = k;
  std::vector<std::vector<double>> grids;
  for (auto f : searchable) {
    const auto& col = schema.column(f);
    std::vector<double> grid;
    if (auto it = config.grids.find(col.name); it != config.grids.end()) {
      if (it->second.empty()) throw ArgumentError("grid for '" + col.name + "' is empty");
      for (const auto& cell : it->second) {
        const double v = encode_cell(col, cell);
        if (std::find(grid.begin(), grid.end(), v) == grid.end()) grid.push_back(v);
      }
    } else {
      grid = default_grid(dataset, f);
      if (grid.empty()) throw ArgumentError("no default grid for '" + col.name + "' (no rows)");
    }
    out.searchable.push_back(col.name);
    out.grids[col.name] = grid;
    grids.push_back(std::move(grid));
  }

  out.original_class = model.predict_one(instance).predictions.at(0);

  // Candidate generation: feature subsets in lexicographic order, then the
  // cartesian product of grid positions that differ from the instance.
  std::vector<Candidate> pending;
  RowMatrix batch(schema.size());
  std::vector<Counterfactual> found;
  auto flush = [&] {
    if (pending.empty()) return;
    const auto pred = model.predict(batch);
    if (pred.predictions.size() != pending.size()) {
      throw RemoteModelError("model returned a prediction count different from the row count");
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (!satisfies(config, out.original_class, pred.predictions[i])) continue;
      Counterfactual cf;
      cf.row.assign(batch.row(i).begin(), batch.row(i).end());
      for (std::size_t j = 0; j < pending[i].features.size(); ++j) {
        const auto f = searchable[pending[i].features[j]];
        cf.changes.push_back({f, schema.column(f).name, instance[f], cf.row[f]});
        cf.grid_positions.push_back(pending[i].positions[j]);
      }
      cf.predicted = pred.predictions[i];
      cf.distance = mixed_distance(instance, cf.row, schema);
      found.push_back(std::move(cf));
    }
    out.evaluated += pending.size();
    pending.clear();
    batch = RowMatrix(schema.size());
  };

  std::vector<double> row(instance.begin(), instance.end());
  std::vector<std::size_t> subset;
  std::vector<std::size_t> pos;
  for (std::size_t size = 1; size <= k; ++size) {
    subset.resize(size);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      std::size_t hits = 0;
      for (auto s : subset) hits += required[searchable[s]] ? 1 : 0;
      const bool ok = config.required_rule == RequiredRule::all ? hits == n_required
                                                                : (n_required == 0 || hits > 0);
      if (ok) {
        pos.assign(size, 0);
        while (true) {
          bool differs = true;
          for (std::size_t j = 0; j < size && differs; ++j) {
            const auto f = searchable[subset[j]];
            differs = grids[subset[j]][pos[j]] != instance[f];
          }
          if (differs) {
            std::copy(instance.begin(), instance.end(), row.begin());
            for (std::size_t j = 0; j < size; ++j) {
              row[searchable[subset[j]]] = grids[subset[j]][pos[j]];
            }
            batch.push_back(row);
            pending.push_back({subset, pos});
            if (pending.size() >= kBatch) flush();
          }
          if (!advance(pos, subset, grids)) break;
        }
      }
      // Next subset of the given size.
      std::size_t i = size;
      while (i > 0 && subset[i - 1] == searchable.size() - size + i - 1) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < size; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  flush();

  std::vector<RankKey> keys;
  keys.reserve(found.size());
  for (const auto& cf : found) keys.push_back(key_of(cf));
  std::vector<std::size_t> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(config.max_results, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) { return key_less(keys[a], keys[b]); });
  for (std::size_t i = 0; i < keep; ++i) out.counterfactuals.push_back(std::move(found[order[i]]));
  if (out.counterfactuals.empty()) {
    out.diagnostic = "search exhausted: none of " + std::to_string(out.evaluated) +
                     " candidates within " + std::to_string(k) +
                     " change(s) satisfies the requested mode";
  }
  return out;
}

void annotate_density(std::vector<Counterfactual>& counterfactuals,
                      const DensityEstimator& estimator) {
  for (auto& cf : counterfactuals) cf.density = estimator.score(cf.row);
}

void score_feasibility(std::vector<Counterfactual>& counterfactuals,
                       const DensityEstimator& estimator) {
  annotate_density(counterfactuals, estimator);
  std::stable_sort(counterfactuals.begin(), counterfactuals.end(),
                   [](const Counterfactual& a, const Counterfactual& b) {
                     if (*a.density != *b.density) return *a.density < *b.density;
                     return a.distance < b.distance;
                   });
}

FairnessVerdict counterfactual_fairness(const Model& model, const Dataset& dataset,
                                        std::span<const double> instance,
                                        std::span<const std::string> protected_features,
                                        CounterfactualConfig config) {
  if (protected_features.empty()) {
    throw ArgumentError("counterfactual fairness needs protected features");
  }
  FairnessVerdict v;
  v.protected_features.assign(protected_features.begin(), protected_features.end());
  if (config.searchable) {
    for (const auto& p : protected_features) {
      auto& s = *config.searchable;
      if (std::find(s.begin(), s.end(), p) == s.end()) s.push_back(p);
    }
  }
  config.required = v.protected_features;
  config.required_rule = RequiredRule::any;
  config.mode = CounterfactualMode::implicit;
  config.target_class.reset();
  const std::size_t max_results = config.max_results;
  if (max_results < 1) throw ArgumentError("max_results must be >= 1");
  config.max_results = std::numeric_limits<std::size_t>::max();
  v.search = find_counterfactuals(model, dataset, instance, config);

  // A foil is evidence only if its protected changes are needed for the flip:
  // with them reverted the prediction returns to the original class.
  const auto prot = dataset.schema().require_indices(v.protected_features);
  auto& found = v.search.counterfactuals;
  RowMatrix reverted(dataset.schema().size());
  reverted.reserve(found.size());
  for (const auto& cf : found) {
    auto row = cf.row;
    for (auto p : prot) row[p] = instance[p];
    reverted.push_back(row);
  }
  const auto back = model.predict(reverted);
  std::vector<Counterfactual> kept;
  for (std::size_t i = 0; i < found.size() && kept.size() < max_results; ++i) {
    if (back.predictions.at(i) == v.search.original_class) kept.push_back(std::move(found[i]));
  }
  found = std::move(kept);
  v.fair = found.empty();
  if (v.fair) {
    v.search.diagnostic = "search exhausted: no counterfactual among " +
                          std::to_string(v.search.evaluated) + " candidates within " +
                          std::to_string(v.search.max_changes) +
                          " change(s) flips the prediction through a protected feature";
  } else {
    v.search.diagnostic.reset();
  }
  return v;
}

CounterfactualSearch same_class_variations(const Model& model, const Dataset& dataset,
                                           std::span<const double> instance,
                                           CounterfactualConfig config) {
  config.mode = CounterfactualMode::same_class;
  config.target_class.reset();
  return find_counterfactuals(model, dataset, instance, config);
}

std::string render_counterfactual(const FeatureSchema& schema, const Counterfactual& cf,
                                  CounterfactualMode mode) {
  std::string s = "Had this instance had ";
  for (std::size_t i = 0; i < cf.changes.size(); ++i) {
    const auto& c = cf.changes[i];
    const auto& col = schema.column(c.feature);
    if (i > 0) s += i + 1 == cf.changes.size() ? " and " : ", ";
    s += c.name + " = " + cell_text(col, c.to) + " instead of " + cell_text(col, c.from);
  }
  s += mode == CounterfactualMode::same_class ? ", it would still have been predicted as \""
                                              : ", it would have been predicted as \"";
  s += cf.predicted + "\".";
  return s;
}

}  // namespace fatkit
