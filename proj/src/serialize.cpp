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

#include "fatkit/serialize.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "fatkit/errors.hpp"

namespace fatkit {

namespace {

void require_keys(const json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view what) {
  if (!j.is_object()) throw ArgumentError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ArgumentError("unknown key '" + key + "' in " + std::string(what));
  }
}

template <typename T>
T get_as(const json& j, std::string_view key, std::string_view what) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError("bad or missing '" + std::string(key) + "' in " + std::string(what));
  }
}

std::size_t get_count(const json& j, std::string_view key, std::string_view what) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ArgumentError("'" + std::string(key) + "' in " + std::string(what) +
                        " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::string> string_list(const json& j, std::string_view key, std::string_view what) {
  const auto& v = j.at(std::string(key));
  if (!v.is_array()) throw ArgumentError("'" + std::string(key) + "' must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ArgumentError("'" + std::string(key) + "' in " + std::string(what) +
                                            " must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

json cell_json(const Column& column, double value) {
  if (column.categorical()) return column.values.at(static_cast<std::size_t>(value));
  return value;
}

double cell_from_json(const Column& column, const json& j) {
  if (column.numeric()) {
    if (!j.is_number()) throw SchemaError("feature '" + column.name + "' expects a number");
    return encode_cell(column, Cell{j.get<double>()});
  }
  if (!j.is_string()) throw SchemaError("feature '" + column.name + "' expects a category token");
  return encode_cell(column, Cell{j.get<std::string>()});
}

json row_json(const FeatureSchema& schema, std::span<const double> row) {
  json out = json::object();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    out[schema.column(c).name] = cell_json(schema.column(c), row[c]);
  }
  return out;
}

std::vector<double> row_from_json(const FeatureSchema& schema, const json& j) {
  std::vector<double> out(schema.size());
  if (j.is_array()) {
    if (j.size() != schema.size()) {
      throw SchemaError("row has " + std::to_string(j.size()) + " cells, schema has " +
                        std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) out[c] = cell_from_json(schema.column(c), j[c]);
    return out;
  }
  if (!j.is_object()) throw SchemaError("row must be a JSON array or object");
  for (const auto& [key, value] : j.items()) {
    if (!schema.index_of(key)) throw SchemaError("row names unknown feature '" + key + "'");
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema.column(c);
    if (!j.contains(col.name)) throw SchemaError("row is missing feature '" + col.name + "'");
    out[c] = cell_from_json(col, j.at(col.name));
  }
  return out;
}

json summary_json(const DatasetSummary& summary) {
  json cols = json::array();
  for (const auto& c : summary.columns) {
    json jc{{"name", c.name}, {"kind", to_string(c.kind)}};
    if (c.kind == FeatureKind::numeric) {
      if (c.numeric) {
        const auto& n = *c.numeric;
        jc["numeric"] = {{"mean", n.mean}, {"min", n.min},       {"max", n.max},
                         {"q1", n.q1},     {"median", n.median}, {"q3", n.q3}};
      } else {
        jc["numeric"] = nullptr;
      }
    } else {
      json counts = json::array();
      for (const auto& [v, k] : c.counts) counts.push_back({{"value", v}, {"count", k}});
      jc["counts"] = counts;
    }
    cols.push_back(jc);
  }
  json dist = json::array();
  for (const auto& [cls, p] : summary.class_distribution) {
    dist.push_back({{"class", cls}, {"fraction", p}});
  }
  return {{"rows", summary.rows}, {"columns", cols}, {"class_distribution", dist}};
}

json partition_json(const GroupPartition& p) {
  json groups = json::array();
  for (const auto& g : p.groups) groups.push_back({{"label", g.label}, {"count", g.count()}});
  return {{"feature", p.feature},
          {"kind", to_string(p.kind)},
          {"thresholds", p.thresholds},
          {"groups", groups}};
}

json representation_json(const std::vector<RepresentationRecord>& records) {
  json out = json::array();
  for (const auto& r : records) {
    json dist = json::object(), counts = json::object();
    for (const auto& [cls, p] : r.class_distribution) dist[cls] = p;
    for (const auto& [cls, k] : r.class_counts) counts[cls] = k;
    out.push_back({{"group", r.label},
                   {"count", r.count},
                   {"class_distribution", dist},
                   {"class_counts", counts},
                   {"sampling_bias", r.sampling_bias},
                   {"class_imbalance", r.class_imbalance},
                   {"empty", r.empty}});
  }
  return out;
}

json disparity_json(const DisparityMatrix& m) {
  json stats = json::array();
  for (const auto& s : m.statistics) stats.push_back(optional_number(s));
  json pairs = json::array();
  for (const auto& [i, j] : m.flagged_pairs()) pairs.push_back({m.groups[i], m.groups[j]});
  return {{"criterion", m.criterion},   {"tolerance", m.tolerance}, {"groups", m.groups},
          {"statistics", stats},        {"values", m.values},       {"flags", m.flags},
          {"undefined", m.undefined},   {"flag_count", m.flag_count()},
          {"flagged_pairs", pairs}};
}

json confusion_json(const Confusion& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

json thresholds_json(const ThresholdAssignment& a) {
  json t = json::array();
  for (double v : a.thresholds) t.push_back(number_json(v));
  return {{"criterion", a.criterion}, {"groups", a.groups},   {"thresholds", t},
          {"achieved", a.achieved},   {"accuracy", a.accuracy}, {"max_gap", a.max_gap},
          {"tolerance", a.tolerance}, {"within_tolerance", a.within_tolerance}};
}

json systemic_bias_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                        std::size_t limit) {
  json listed = json::array();
  for (std::size_t i = 0; i < pairs.size() && i < limit; ++i) {
    listed.push_back({pairs[i].first, pairs[i].second});
  }
  return {{"pair_count", pairs.size()},
          {"flagged", !pairs.empty()},
          {"pairs", listed},
          {"truncated", pairs.size() > limit}};
}

json prediction_json(const Model& model, const PredictionBatch& batch, std::size_t row) {
  json out{{"prediction", batch.predictions.at(row)}};
  if (batch.probabilities) {
    json p = json::object();
    const auto& classes = model.classes();
    for (std::size_t k = 0; k < classes.size(); ++k) p[classes[k]] = (*batch.probabilities)[row][k];
    out["probabilities"] = p;
  } else {
    out["probabilities"] = nullptr;
  }
  return out;
}

json confidence_json(const PredictionConfidence& c, double threshold) {
  return {{"prediction", c.prediction},
          {"density", c.density},
          {"robust", c.robust},
          {"threshold", threshold}};
}

json density_flags_json(const DensityEstimator& est, std::span<const SparsePoint> flagged,
                        double threshold) {
  json f = json::array();
  for (const auto& p : flagged) f.push_back({{"row", p.row}, {"score", p.score}});
  return {{"n", est.neighbour()},
          {"metric", to_string(est.metric())},
          {"features", est.features()},
          {"reference_rows", est.reference_rows()},
          {"min_raw", est.min_raw()},
          {"max_raw", est.max_raw()},
          {"threshold", threshold},
          {"flagged", f}};
}

json counterfactual_json(const FeatureSchema& schema, const Counterfactual& cf,
                         CounterfactualMode mode) {
  json changes = json::array();
  for (const auto& c : cf.changes) {
    const auto& col = schema.column(c.feature);
    changes.push_back(
        {{"feature", c.name}, {"old", cell_json(col, c.from)}, {"new", cell_json(col, c.to)}});
  }
  return {{"changes", changes},
          {"class", cf.predicted},
          {"distance", cf.distance},
          {"density", optional_number(cf.density)},
          {"row", row_json(schema, cf.row)},
          {"sentence", render_counterfactual(schema, cf, mode)}};
}

json search_json(const FeatureSchema& schema, const CounterfactualSearch& search,
                 CounterfactualMode mode) {
  json list = json::array();
  for (const auto& cf : search.counterfactuals) list.push_back(counterfactual_json(schema, cf, mode));
  json grids = json::object();
  for (const auto& [name, grid] : search.grids) {
    const auto& col = schema.column(schema.require_index(name));
    json g = json::array();
    for (double v : grid) g.push_back(cell_json(col, v));
    grids[name] = g;
  }
  return {{"original_class", search.original_class},
          {"mode", to_string(mode)},
          {"counterfactuals", list},
          {"evaluated", search.evaluated},
          {"scope", {{"max_changes", search.max_changes},
                     {"searchable", search.searchable},
                     {"grids", grids}}},
          {"diagnostic", search.diagnostic ? json(*search.diagnostic) : json(nullptr)}};
}

json verdict_json(const FeatureSchema& schema, const FairnessVerdict& v) {
  return {{"verdict", v.fair ? "fair" : "unfair"},
          {"protected", v.protected_features},
          {"search", search_json(schema, v.search, CounterfactualMode::implicit)}};
}

json explanation_json(const SurrogateExplanation& ex) {
  json out{{"kind", ex.kind},
           {"locality", to_string(ex.locality)},
           {"interpretable", ex.interpretable},
           {"explained_class", ex.explained_class},
           {"features", ex.features},
           {"fidelity", ex.fidelity},
           {"sample_size", ex.sample_size},
           {"diagnostics", ex.diagnostics}};
  if (ex.linear) {
    json w = json::object();
    for (std::size_t i = 0; i < ex.features.size(); ++i) w[ex.features[i]] = ex.linear->weights[i];
    out["linear"] = {{"weights", w}, {"intercept", ex.linear->intercept}};
  } else {
    json rule = json::array();
    for (const auto& p : ex.rule) {
      rule.push_back({{"feature", p.feature}, {"op", to_string(p.op)}, {"value", p.value}});
    }
    json imp = json::object();
    for (std::size_t i = 0; i < ex.features.size(); ++i) imp[ex.features[i]] = ex.importances[i];
    out["tree"] = {{"rule", rule}, {"importances", imp}};
  }
  return out;
}

json ice_pd_json(const FeatureSchema& schema, const IcePd& r) {
  const auto& col = schema.column(schema.require_index(r.feature));
  json grid = json::array();
  for (double v : r.grid) grid.push_back(cell_json(col, v));
  return {{"feature", r.feature},
          {"grid", grid},
          {"quantity", r.quantity},
          {"ice", r.ice},
          {"pd", r.pd}};
}

CounterfactualConfig counterfactual_config_from_json(const FeatureSchema& schema, const json& j) {
  constexpr std::string_view what = "counterfactual config";
  require_keys(j,
               {"max_changes", "grids", "searchable", "required", "required_rule", "mode",
                "target_class", "max_results"},
               what);
  CounterfactualConfig c;
  if (j.contains("max_changes")) c.max_changes = get_count(j, "max_changes", what);
  if (j.contains("max_results")) c.max_results = get_count(j, "max_results", what);
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    if (!g.is_object()) throw ArgumentError("'grids' must map feature names to value lists");
    for (const auto& [name, values] : g.items()) {
      const auto& col = schema.column(schema.require_index(name));
      if (!values.is_array()) throw ArgumentError("grid for '" + name + "' must be a list");
      std::vector<Cell> cells;
      for (const auto& v : values) {
        (void)cell_from_json(col, v);
        if (col.numeric()) cells.emplace_back(v.get<double>());
        else cells.emplace_back(v.get<std::string>());
      }
      c.grids[name] = std::move(cells);
    }
  }
  if (j.contains("searchable")) c.searchable = string_list(j, "searchable", what);
  if (j.contains("required")) c.required = string_list(j, "required", what);
  if (j.contains("required_rule")) {
    const auto r = get_as<std::string>(j, "required_rule", what);
    if (r == "all") c.required_rule = RequiredRule::all;
    else if (r == "any") c.required_rule = RequiredRule::any;
    else throw ArgumentError("required_rule must be 'all' or 'any'");
  }
  if (j.contains("mode")) c.mode = parse_counterfactual_mode(get_as<std::string>(j, "mode", what));
  if (j.contains("target_class") && !j.at("target_class").is_null()) {
    c.target_class = get_as<std::string>(j, "target_class", what);
  }
  return c;
}

json counterfactual_config_json(const FeatureSchema& schema, const CounterfactualConfig& c) {
  json grids = json::object();
  for (const auto& [name, cells] : c.grids) {
    const auto& col = schema.column(schema.require_index(name));
    json g = json::array();
    for (const auto& cell : cells) g.push_back(cell_json(col, encode_cell(col, cell)));
    grids[name] = g;
  }
  return {{"max_changes", c.max_changes},
          {"grids", grids},
          {"searchable", c.searchable ? json(*c.searchable) : json(nullptr)},
          {"required", c.required},
          {"required_rule", c.required_rule == RequiredRule::all ? "all" : "any"},
          {"mode", to_string(c.mode)},
          {"target_class", c.target_class ? json(*c.target_class) : json(nullptr)},
          {"max_results", c.max_results}};
}

SurrogateConfig surrogate_config_from_json(const json& j) {
  constexpr std::string_view what = "surrogate config";
  require_keys(j,
               {"sampler", "interpretable", "kernel_width", "top_m", "surrogate", "seed",
                "locality"},
               what);
  SurrogateConfig c;
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    require_keys(s, {"kind", "n", "scale", "alpha"}, "sampler");
    const auto kind = s.contains("kind") ? get_as<std::string>(s, "kind", "sampler") : "normal";
    if (kind == "normal") {
      if (s.contains("alpha")) throw ArgumentError("normal sampler takes no 'alpha'");
      NormalSampler n;
      if (s.contains("n")) n.n = get_count(s, "n", "sampler");
      if (s.contains("scale")) n.scale = get_as<double>(s, "scale", "sampler");
      c.sampler = n;
    } else if (kind == "mixup") {
      if (s.contains("scale")) throw ArgumentError("mixup sampler takes no 'scale'");
      MixupSampler m;
      if (s.contains("n")) m.n = get_count(s, "n", "sampler");
      if (s.contains("alpha")) m.alpha = get_as<double>(s, "alpha", "sampler");
      c.sampler = m;
    } else {
      throw ArgumentError("sampler kind must be 'normal' or 'mixup'");
    }
  }
  if (j.contains("interpretable")) c.interpretable = get_as<bool>(j, "interpretable", what);
  if (j.contains("kernel_width")) {
    if (j.at("kernel_width").is_null()) c.kernel_width.reset();
    else c.kernel_width = get_as<double>(j, "kernel_width", what);
  }
  if (j.contains("top_m")) {
    if (j.at("top_m").is_null()) c.top_m.reset();
    else c.top_m = get_count(j, "top_m", what);
  }
  if (j.contains("surrogate")) {
    const auto& s = j.at("surrogate");
    require_keys(s, {"kind", "lambda", "max_depth"}, "surrogate");
    const auto kind = s.contains("kind") ? get_as<std::string>(s, "kind", "surrogate") : "ridge";
    if (kind == "ridge") {
      if (s.contains("max_depth")) throw ArgumentError("ridge surrogate takes no 'max_depth'");
      RidgeSurrogate r;
      if (s.contains("lambda")) r.lambda = get_as<double>(s, "lambda", "surrogate");
      c.surrogate = r;
    } else if (kind == "tree") {
      if (s.contains("lambda")) throw ArgumentError("tree surrogate takes no 'lambda'");
      TreeSurrogate t;
      if (s.contains("max_depth")) t.max_depth = get_as<int>(s, "max_depth", "surrogate");
      c.surrogate = t;
    } else {
      throw ArgumentError("surrogate kind must be 'ridge' or 'tree'");
    }
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ArgumentError("seed must be a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("locality")) {
    const auto l = get_as<std::string>(j, "locality", what);
    if (l == "local") c.locality = Locality::local;
    else if (l == "global") c.locality = Locality::global;
    else throw ArgumentError("locality must be 'local' or 'global'");
  }
  return c;
}

json surrogate_config_json(const SurrogateConfig& c) {
  json sampler;
  if (const auto* n = std::get_if<NormalSampler>(&c.sampler)) {
    sampler = {{"kind", "normal"}, {"n", n->n}, {"scale", n->scale}};
  } else {
    const auto& m = std::get<MixupSampler>(c.sampler);
    sampler = {{"kind", "mixup"}, {"n", m.n}, {"alpha", m.alpha}};
  }
  json surrogate;
  if (const auto* r = std::get_if<RidgeSurrogate>(&c.surrogate)) {
    surrogate = {{"kind", "ridge"}, {"lambda", r->lambda}};
  } else {
    surrogate = {{"kind", "tree"}, {"max_depth", std::get<TreeSurrogate>(c.surrogate).max_depth}};
  }
  return {{"sampler", sampler},
          {"interpretable", c.interpretable},
          {"kernel_width", c.kernel_width ? json(*c.kernel_width) : json(nullptr)},
          {"top_m", c.top_m ? json(*c.top_m) : json(nullptr)},
          {"surrogate", surrogate},
          {"seed", c.seed},
          {"locality", to_string(c.locality)}};
}

}  // namespace fatkit
