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

#include "fatkit/report.hpp"

#include <algorithm>
#include <sstream>

#include "fatkit/errors.hpp"
#include "fatkit/fairness.hpp"
#include "fatkit/grouping.hpp"
#include "fatkit/serialize.hpp"

namespace fatkit {

const std::vector<std::string>& section_names() {
  static const std::vector<std::string> names{
      "data_summary", "representation", "systemic_bias",          "fairness",
      "performance",  "density",        "counterfactual_fairness", "surrogates"};
  return names;
}

namespace {

constexpr PerformanceMetric kPerformanceMetrics[] = {
    PerformanceMetric::accuracy, PerformanceMetric::tpr, PerformanceMetric::tnr,
    PerformanceMetric::fpr, PerformanceMetric::fnr};

constexpr FairnessCriterion kCriteria[] = {FairnessCriterion::demographic_parity,
                                           FairnessCriterion::equal_opportunity,
                                           FairnessCriterion::equal_accuracy};

json skipped(const std::string& reason) { return {{"status", "skipped"}, {"reason", reason}}; }

std::vector<std::string> selected_sections(const AuditOptions& options) {
  if (options.sections.empty()) return section_names();
  for (const auto& s : options.sections) {
    const auto& all = section_names();
    if (std::find(all.begin(), all.end(), s) == all.end()) {
      throw ArgumentError("unknown report section '" + s + "'");
    }
  }
  std::vector<std::string> out;
  for (const auto& s : section_names()) {
    if (std::find(options.sections.begin(), options.sections.end(), s) != options.sections.end()) {
      out.push_back(s);
    }
  }
  return out;
}

GroupPartition protected_partition(const Dataset& dataset, const std::string& feature) {
  const auto& col = dataset.schema().column(dataset.schema().require_index(feature));
  if (col.categorical()) return partition(dataset, feature);
  return partition(dataset, feature, quartile_thresholds(dataset, feature));
}

struct Context {
  const Dataset& dataset;
  const Model& model;
  const AuditOptions& options;
  std::string positive;
  std::vector<std::string> prot;
  std::vector<GroupPartition> partitions;
  std::optional<PredictionBatch> predictions;
  std::optional<std::vector<SparsePoint>> sparse;
  std::size_t flags = 0;

  const PredictionBatch& predicted() {
    if (!predictions) {
      predictions = model.supports_proba() ? model.predict_proba(dataset.features())
                                           : model.predict(dataset.features());
    }
    return *predictions;
  }
};

json data_summary_section(Context& ctx) {
  json out = summary_json(summarize(ctx.dataset));
  out["status"] = "ok";
  return out;
}

json representation_section(Context& ctx) {
  if (ctx.prot.empty()) return skipped("no protected features configured");
  json features = json::array();
  for (std::size_t i = 0; i < ctx.prot.size(); ++i) {
    const auto records = representation_audit(ctx.partitions[i], ctx.dataset.labels());
    features.push_back({{"feature", ctx.prot[i]},
                        {"partition", partition_json(ctx.partitions[i])},
                        {"groups", representation_json(records)}});
  }
  return {{"status", "ok"},
          {"min_group_fraction", RepresentationDefaults::min_group_fraction},
          {"imbalance_ratio", RepresentationDefaults::imbalance_ratio},
          {"features", features}};
}

json systemic_bias_section(Context& ctx) {
  if (ctx.prot.empty()) return skipped("no protected features configured");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  try {
    pairs = systemic_bias(ctx.dataset, ctx.prot);
  } catch (const ArgumentError& e) {
    return skipped(e.what());
  }
  ctx.flags += pairs.size();
  json out = systemic_bias_json(pairs, ctx.options.systemic_pairs_listed);
  out["status"] = "ok";
  out["protected"] = ctx.prot;
  return out;
}

json fairness_section(Context& ctx) {
  if (ctx.prot.empty()) return skipped("no protected features configured");
  const auto& pred = ctx.predicted();
  std::vector<double> scores;
  if (pred.probabilities) {
    const auto& classes = ctx.model.classes();
    const auto k = static_cast<std::size_t>(
        std::find(classes.begin(), classes.end(), ctx.positive) - classes.begin());
    for (const auto& p : *pred.probabilities) scores.push_back(p[k]);
  }
  json features = json::array();
  std::size_t flags = 0;
  for (std::size_t i = 0; i < ctx.prot.size(); ++i) {
    json matrices = json::object();
    json thresholds = json::object();
    for (auto c : kCriteria) {
      const auto m = group_fairness(ctx.partitions[i], ctx.dataset.labels(), pred.predictions, c,
                                    ctx.positive, ctx.options.inputs.tolerance);
      flags += m.flag_count();
      matrices[std::string(to_string(c))] = disparity_json(m);
      if (scores.empty()) continue;
      try {
        thresholds[std::string(to_string(c))] =
            thresholds_json(fit_group_thresholds(scores, ctx.partitions[i], ctx.dataset.labels(),
                                                 c, ctx.positive, ctx.options.inputs.tolerance));
      } catch (const Error& e) {
        thresholds[std::string(to_string(c))] = {{"error", e.what()}};
      }
    }
    json entry{{"feature", ctx.prot[i]},
               {"partition", partition_json(ctx.partitions[i])},
               {"matrices", matrices}};
    entry["thresholds"] =
        scores.empty() ? json(skipped("model does not provide probabilities")) : thresholds;
    features.push_back(entry);
  }
  ctx.flags += flags;
  return {{"status", "ok"},
          {"positive_class", ctx.positive},
          {"tolerance", ctx.options.inputs.tolerance},
          {"flag_count", flags},
          {"features", features}};
}

json performance_section(Context& ctx) {
  if (ctx.prot.empty()) return skipped("no protected features configured");
  const auto& pred = ctx.predicted();
  json features = json::array();
  std::size_t flags = 0;
  for (std::size_t i = 0; i < ctx.prot.size(); ++i) {
    json matrices = json::object();
    for (auto m : kPerformanceMetrics) {
      const auto d = performance_disparity(ctx.partitions[i], ctx.dataset.labels(),
                                           pred.predictions, m, ctx.positive,
                                           ctx.options.inputs.tolerance);
      flags += d.flag_count();
      matrices[std::string(to_string(m))] = disparity_json(d);
    }
    json conf = json::object();
    const auto cs = group_confusions(ctx.partitions[i], ctx.dataset.labels(), pred.predictions,
                                     ctx.positive);
    for (std::size_t g = 0; g < cs.size(); ++g) {
      conf[ctx.partitions[i].groups[g].label] = confusion_json(cs[g]);
    }
    features.push_back({{"feature", ctx.prot[i]}, {"matrices", matrices}, {"confusion", conf}});
  }
  ctx.flags += flags;
  return {{"status", "ok"},
          {"positive_class", ctx.positive},
          {"tolerance", ctx.options.inputs.tolerance},
          {"flag_count", flags},
          {"features", features}};
}

std::optional<DensityEstimator> fit_reference(Context& ctx, std::string& reason) {
  const auto rows = std::min(ctx.options.density_rows, ctx.dataset.rows());
  if (rows <= ctx.options.density.neighbour) {
    reason = "needs more than " + std::to_string(ctx.options.density.neighbour) +
             " reference rows";
    return std::nullopt;
  }
  return DensityEstimator::fit(ctx.dataset.head(rows), ctx.options.density);
}

json density_section(Context& ctx, const std::optional<DensityEstimator>& est,
                     const std::string& reason) {
  if (!est) return skipped(reason);
  const auto reference = ctx.dataset.head(est->reference_rows());
  const auto scores = est->scores(reference.features());
  ctx.sparse = sparse_points(scores, ctx.options.density_threshold);
  json out = density_flags_json(*est, *ctx.sparse, ctx.options.density_threshold);
  out["status"] = "ok";
  return out;
}

json counterfactual_fairness_section(Context& ctx, const std::optional<DensityEstimator>& est) {
  if (ctx.prot.empty()) return skipped("no protected features configured");
  if (ctx.dataset.rows() == 0) return skipped("dataset has no rows");
  std::vector<std::size_t> rows;
  std::string selection;
  if (ctx.sparse && !ctx.sparse->empty()) {
    for (std::size_t i = 0; i < ctx.sparse->size() && i < ctx.options.counterfactual_instances;
         ++i) {
      rows.push_back((*ctx.sparse)[i].row);
    }
    selection = "sparsest density-flagged rows";
  } else {
    rows.push_back(0);
    selection = "first row (no density-flagged rows)";
  }
  json instances = json::array();
  std::size_t unfair = 0;
  for (auto r : rows) {
    auto v = counterfactual_fairness(ctx.model, ctx.dataset, ctx.dataset.row(r), ctx.prot,
                                     ctx.options.counterfactual);
    if (est) annotate_density(v.search.counterfactuals, *est);
    unfair += v.fair ? 0 : 1;
    json j = verdict_json(ctx.dataset.schema(), v);
    j["row"] = r;
    instances.push_back(j);
  }
  return {{"status", "ok"},
          {"selection", selection},
          {"unfair_count", unfair},
          {"instances", instances}};
}

json surrogates_section(Context& ctx) {
  if (ctx.dataset.rows() == 0) return skipped("dataset has no rows");
  SurrogateConfig tree = ctx.options.surrogate;
  tree.locality = Locality::global;
  tree.surrogate = TreeSurrogate{ctx.options.surrogate_tree_depth};
  SurrogateConfig ridge = ctx.options.surrogate;
  ridge.locality = Locality::global;
  if (!std::holds_alternative<RidgeSurrogate>(ridge.surrogate)) ridge.surrogate = RidgeSurrogate{};
  json out{{"status", "ok"}};
  for (const auto& [name, cfg] : {std::pair{"tree", tree}, std::pair{"ridge", ridge}}) {
    try {
      out[name] = explanation_json(explain(ctx.model, ctx.dataset, std::nullopt, cfg));
    } catch (const Error& e) {
      out[name] = {{"error", e.what()}};
    }
  }
  return out;
}

}  // namespace

json audit_config_json(const AuditOptions& options, const FeatureSchema& schema) {
  json density{{"n", options.density.neighbour},
               {"metric", to_string(options.density.metric)},
               {"features", options.density.features},
               {"reference_rows", options.density_rows},
               {"threshold", options.density_threshold}};
  return {{"inputs", inputs_json(options.inputs)},
          {"sections", selected_sections(options)},
          {"density", density},
          {"counterfactual",
           {{"instances", options.counterfactual_instances},
            {"config", counterfactual_config_json(schema, options.counterfactual)}}},
          {"surrogate",
           {{"config", surrogate_config_json(options.surrogate)},
            {"tree_depth", options.surrogate_tree_depth}}},
          {"systemic_pairs_listed", options.systemic_pairs_listed}};
}

AuditResult run_audit(const Dataset& dataset, const Model& model, const AuditOptions& options,
                      const std::string& generated_at) {
  if (!model.fitted()) throw StateError("audit needs a fitted model");
  const auto sections = selected_sections(options);
  const json config = audit_config_json(options, dataset.schema());
  Context ctx{dataset, model, options, positive_class(options.inputs, model),
              dataset.schema().protected_features(), {}, {}, {}, 0};
  for (const auto& p : ctx.prot) ctx.partitions.push_back(protected_partition(dataset, p));

  auto wanted = [&](const std::string& s) {
    return std::find(sections.begin(), sections.end(), s) != sections.end();
  };
  json body_sections = json::object();
  for (const auto& s : section_names()) body_sections[s] = skipped("not selected");

  if (wanted("data_summary")) body_sections["data_summary"] = data_summary_section(ctx);
  if (wanted("representation")) body_sections["representation"] = representation_section(ctx);
  if (wanted("systemic_bias")) body_sections["systemic_bias"] = systemic_bias_section(ctx);
  if (wanted("fairness")) body_sections["fairness"] = fairness_section(ctx);
  if (wanted("performance")) body_sections["performance"] = performance_section(ctx);
  std::optional<DensityEstimator> est;
  std::string reason;
  if (wanted("density") || wanted("counterfactual_fairness")) est = fit_reference(ctx, reason);
  if (wanted("density")) body_sections["density"] = density_section(ctx, est, reason);
  if (wanted("counterfactual_fairness")) {
    if (est && !ctx.sparse) {
      ctx.sparse = sparse_points(est->scores(dataset.head(est->reference_rows()).features()),
                                 options.density_threshold);
    }
    body_sections["counterfactual_fairness"] = counterfactual_fairness_section(ctx, est);
  }
  if (wanted("surrogates")) body_sections["surrogates"] = surrogates_section(ctx);

  AuditResult result;
  result.flag_count = ctx.flags;
  json metadata{{"toolkit", "fatkit"},
                {"version", FATKIT_VERSION},
                {"seed", options.inputs.seed},
                {"config_digest", config_digest(config)},
                {"generated_at", generated_at}};
  json body{{"config", config},
            {"summary", {{"flag_count", ctx.flags}, {"flagged", ctx.flags > 0}}},
            {"sections", body_sections}};
  result.report = {{"metadata", metadata}, {"body", body}};
  return result;
}

namespace {

std::string text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "n/a";
  if (j.is_number_float()) {
    std::ostringstream s;
    s.precision(4);
    s << j.get<double>();
    return s.str();
  }
  return j.dump();
}

std::string title(const std::string& name) {
  std::string out = name;
  std::replace(out.begin(), out.end(), '_', ' ');
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

void matrix_md(std::ostringstream& md, const json& m) {
  const auto& groups = m.at("groups");
  md << "\n**" << text(m.at("criterion")) << "** (flags: " << text(m.at("flag_count"))
     << ", tolerance " << text(m.at("tolerance")) << ")\n\n|  |";
  for (const auto& g : groups) md << " " << text(g) << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < groups.size(); ++i) md << "---|";
  md << "\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    md << "| " << text(groups[i]) << " |";
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (m.at("undefined")[i][j].get<bool>()) {
        md << " undefined |";
        continue;
      }
      md << " " << text(m.at("values")[i][j]) << (m.at("flags")[i][j].get<bool>() ? " (!)" : "")
         << " |";
    }
    md << "\n";
  }
}

}  // namespace

std::string render_markdown(const json& report) {
  std::ostringstream md;
  const auto& meta = report.at("metadata");
  const auto& body = report.at("body");
  md << "# Audit report\n\n";
  md << "- toolkit: " << text(meta.at("toolkit")) << " " << text(meta.at("version")) << "\n";
  md << "- seed: " << text(meta.at("seed")) << "\n";
  md << "- config digest: `" << text(meta.at("config_digest")) << "`\n";
  md << "- generated at: " << text(meta.at("generated_at")) << "\n";
  md << "- flags raised: " << text(body.at("summary").at("flag_count")) << "\n";

  for (const auto& name : section_names()) {
    const auto& s = body.at("sections").at(name);
    md << "\n## " << title(name) << "\n\n";
    if (s.at("status") == "skipped") {
      md << "_Skipped: " << text(s.at("reason")) << "_\n";
      continue;
    }
    if (name == "data_summary") {
      md << "Rows: " << text(s.at("rows")) << "\n\n| feature | kind | summary |\n|---|---|---|\n";
      for (const auto& c : s.at("columns")) {
        md << "| " << text(c.at("name")) << " | " << text(c.at("kind")) << " | ";
        if (c.contains("numeric")) {
          const auto& n = c.at("numeric");
          if (n.is_null()) {
            md << "n/a";
          } else {
            md << "mean " << text(n.at("mean")) << ", min " << text(n.at("min")) << ", median "
               << text(n.at("median")) << ", max " << text(n.at("max"));
          }
        } else {
          md << c.at("counts").size() << " values";
        }
        md << " |\n";
      }
      md << "\nClass distribution:";
      for (const auto& d : s.at("class_distribution")) {
        md << " " << text(d.at("class")) << " " << text(d.at("fraction")) << ";";
      }
      md << "\n";
    } else if (name == "representation") {
      for (const auto& f : s.at("features")) {
        md << "### " << text(f.at("feature")) << "\n\n"
           << "| group | count | sampling bias | class imbalance |\n|---|---|---|---|\n";
        for (const auto& g : f.at("groups")) {
          md << "| " << text(g.at("group")) << " | " << text(g.at("count")) << " | "
             << (g.at("sampling_bias").get<bool>() ? "yes" : "no") << " | "
             << (g.at("class_imbalance").get<bool>() ? "yes" : "no") << " |\n";
        }
        md << "\n";
      }
    } else if (name == "systemic_bias") {
      md << "Pairs identical except for protected features with different labels: "
         << text(s.at("pair_count")) << "\n";
    } else if (name == "fairness" || name == "performance") {
      md << "Positive class: " << text(s.at("positive_class")) << "; flags: "
         << text(s.at("flag_count")) << "\n";
      for (const auto& f : s.at("features")) {
        md << "\n### " << text(f.at("feature")) << "\n";
        for (const auto& [k, m] : f.at("matrices").items()) matrix_md(md, m);
      }
    } else if (name == "density") {
      md << "n = " << text(s.at("n")) << ", metric " << text(s.at("metric")) << ", "
         << text(s.at("reference_rows")) << " reference rows, threshold "
         << text(s.at("threshold")) << "\n\n";
      if (s.at("flagged").empty()) {
        md << "No sparse rows.\n";
      } else {
        md << "| row | score |\n|---|---|\n";
        for (const auto& p : s.at("flagged")) {
          md << "| " << text(p.at("row")) << " | " << text(p.at("score")) << " |\n";
        }
      }
    } else if (name == "counterfactual_fairness") {
      md << "Instances: " << text(s.at("selection")) << "\n\n";
      for (const auto& inst : s.at("instances")) {
        const auto& scope = inst.at("search").at("scope");
        md << "- row " << text(inst.at("row")) << ": **" << text(inst.at("verdict"))
           << "** (up to " << text(scope.at("max_changes")) << " changes over "
           << scope.at("searchable").size() << " features)\n";
        for (const auto& cf : inst.at("search").at("counterfactuals")) {
          md << "  - " << text(cf.at("sentence")) << "\n";
        }
      }
    } else if (name == "surrogates") {
      for (const auto* kind : {"tree", "ridge"}) {
        const auto& e = s.at(kind);
        md << "### Global " << kind << " surrogate\n\n";
        if (e.contains("error")) {
          md << "Failed: " << text(e.at("error")) << "\n\n";
          continue;
        }
        md << "Fidelity " << text(e.at("fidelity")) << " for class \""
           << text(e.at("explained_class")) << "\".\n\n| feature | "
           << (e.contains("tree") ? "importance" : "weight") << " |\n|---|---|\n";
        const auto& values =
            e.contains("tree") ? e.at("tree").at("importances") : e.at("linear").at("weights");
        for (const auto& [f, v] : values.items()) md << "| " << f << " | " << text(v) << " |\n";
        md << "\n";
      }
    }
  }
  return md.str();
}

}  // namespace fatkit
