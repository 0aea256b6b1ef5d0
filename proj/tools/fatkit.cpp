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

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fatkit/app.hpp"
#include "fatkit/errors.hpp"
#include "fatkit/report.hpp"
#include "fatkit/serialize.hpp"
#include "fatkit/service.hpp"

namespace {

using fatkit::json;

struct CommonFlags {
  fatkit::Inputs inputs;
  std::string schema;
  std::string remote;
  std::string positive;
  std::string format = "json";
  std::size_t density_n = 7;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--data", f.inputs.data, "CSV file with a header line")->required();
  cmd->add_option("--schema", f.schema, "JSON schema file (inferred when absent)");
  cmd->add_option("--target", f.inputs.target, "target column (defaults to the schema's)");
  cmd->add_option("--protected", f.inputs.protected_features, "protected feature names")
      ->delimiter(',');
  cmd->add_option("--model", f.inputs.model.kind, "built-in model: tree, knn or logistic")
      ->check(CLI::IsMember({"tree", "knn", "logistic"}));
  cmd->add_option("--max-depth", f.inputs.model.max_depth, "tree depth")->check(CLI::NonNegativeNumber);
  cmd->add_option("--neighbours", f.inputs.model.neighbours, "kNN neighbours")->check(CLI::PositiveNumber);
  cmd->add_option("--remote-url", f.remote, "use the model served at this base URL");
  cmd->add_flag("--remote-proba", f.inputs.remote_probabilities,
                "the remote model returns probabilities");
  cmd->add_option("--seed", f.inputs.seed, "random seed");
  cmd->add_option("--tolerance", f.inputs.tolerance, "disparity tolerance")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--positive", f.positive, "positive class (defaults to the last class)");
  cmd->add_option("--density-n", f.density_n, "neighbour rank used by the density score")
      ->check(CLI::PositiveNumber);
}

fatkit::ServiceOptions service_options(const CommonFlags& f) {
  fatkit::ServiceOptions o;
  o.density.neighbour = f.density_n;
  return o;
}

void finish(CommonFlags& f) {
  if (!f.schema.empty()) f.inputs.schema = f.schema;
  if (!f.remote.empty()) f.inputs.remote_url = f.remote;
  if (!f.positive.empty()) f.inputs.positive_class = f.positive;
}

void write_out(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fatkit::ArgumentError("cannot write '" + path + "'");
  out << text;
}

json parse_json_arg(const std::string& text, const char* flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw fatkit::ArgumentError(std::string(flag) + " is not valid JSON: " + e.what());
  }
}

std::string explain_markdown(const std::string& method, const json& body) {
  std::string md = "# Explanation (" + method + ")\n\n";
  if (body.contains("error")) return md + "Error: " + body.at("error").get<std::string>() + "\n";
  if (method == "counterfactual") {
    md += "Original prediction: \"" + body.at("original_class").get<std::string>() + "\"\n\n";
    for (const auto& cf : body.at("counterfactuals")) {
      md += "- " + cf.at("sentence").get<std::string>() + "\n";
    }
    if (!body.at("diagnostic").is_null()) md += body.at("diagnostic").get<std::string>() + "\n";
    return md;
  }
  return md + "```json\n" + body.dump(2) + "\n```\n";
}

fatkit::HttpService* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fatkit: fairness, accountability and transparency audits for tabular models"};
  app.set_version_flag("--version", std::string(FATKIT_VERSION));
  app.require_subcommand(1);

  CommonFlags audit_flags;
  std::vector<std::string> sections;
  std::string output;
  auto* audit = app.add_subcommand("audit", "run the audit and print a report");
  add_common(audit, audit_flags);
  audit->add_option("--format", audit_flags.format, "json or md")
      ->check(CLI::IsMember({"json", "md"}));
  audit->add_option("--section", sections, "sections to run (default: all)")
      ->delimiter(',')
      ->check(CLI::IsMember(fatkit::section_names()));
  audit->add_option("--output", output, "write the report here instead of stdout");

  CommonFlags explain_flags;
  std::string method, row_text, config_text, feature, grid_text, cls;
  std::optional<std::size_t> instance;
  bool feasibility = false;
  auto* explain = app.add_subcommand("explain", "explain one instance or feature");
  add_common(explain, explain_flags);
  explain->add_option("--format", explain_flags.format, "json or md")
      ->check(CLI::IsMember({"json", "md"}));
  explain->add_option("--method", method, "counterfactual, surrogate, ice-pd or density")
      ->required()
      ->check(CLI::IsMember({"counterfactual", "surrogate", "ice-pd", "density"}));
  auto* inst_opt = explain->add_option("--instance", instance, "dataset row index");
  explain->add_option("--row", row_text, "inline row as a JSON array or object")
      ->excludes(inst_opt);
  explain->add_option("--config", config_text, "method configuration as JSON");
  explain->add_option("--feature", feature, "feature for ice-pd");
  explain->add_option("--grid", grid_text, "ice-pd grid as a JSON list");
  explain->add_option("--class", cls, "ice-pd class (defaults to the positive class)");
  explain->add_flag("--feasibility", feasibility, "re-rank counterfactuals by density");
  explain->add_option("--output", output, "write the result here instead of stdout");

  CommonFlags serve_flags;
  std::string host = "127.0.0.1", assets;
  int port = 8000;
  auto* serve = app.add_subcommand("serve", "serve the what-if JSON API");
  add_common(serve, serve_flags);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--assets", assets, "static UI bundle served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (audit->parsed()) {
      finish(audit_flags);
      const auto dataset = fatkit::load_dataset(audit_flags.inputs);
      const auto model = fatkit::build_model(audit_flags.inputs, dataset);
      fatkit::AuditOptions options;
      options.inputs = audit_flags.inputs;
      options.surrogate.seed = audit_flags.inputs.seed;
      options.density.neighbour = audit_flags.density_n;
      options.sections = sections;
      const auto result = fatkit::run_audit(dataset, *model, options, fatkit::utc_timestamp());
      write_out(audit_flags.format == "md" ? fatkit::render_markdown(result.report)
                                           : result.report.dump(2) + "\n",
                output);
      return result.exit_code();
    }

    if (explain->parsed()) {
      finish(explain_flags);
      auto dataset = fatkit::load_dataset(explain_flags.inputs);
      auto model = fatkit::build_model(explain_flags.inputs, dataset);
      json row;
      if (instance) {
        if (*instance >= dataset.rows()) {
          throw fatkit::ArgumentError("instance " + std::to_string(*instance) +
                                      " is out of range (" + std::to_string(dataset.rows()) +
                                      " rows)");
        }
        row = fatkit::row_json(dataset.schema(), dataset.row(*instance));
      } else if (!row_text.empty()) {
        row = parse_json_arg(row_text, "--row");
      }
      const json config = config_text.empty() ? json::object() : parse_json_arg(config_text, "--config");
      json request = json::object();
      std::string path;
      if (method == "counterfactual" || method == "density") {
        if (row.is_null()) throw fatkit::ArgumentError("--instance or --row is required");
        request["row"] = row;
        if (method == "counterfactual") {
          request["config"] = config;
          if (feasibility) request["feasibility"] = true;
          path = "/api/counterfactuals";
        } else {
          path = "/api/density";
        }
      } else if (method == "surrogate") {
        if (!row.is_null()) request["row"] = row;
        request["config"] = config;
        path = "/api/surrogate";
      } else {
        if (feature.empty()) throw fatkit::ArgumentError("--feature is required for ice-pd");
        request["feature"] = feature;
        if (!grid_text.empty()) request["grid"] = parse_json_arg(grid_text, "--grid");
        if (!cls.empty()) request["class"] = cls;
        path = "/api/ice-pd";
      }
      const fatkit::Service service(std::move(dataset), std::move(model), explain_flags.inputs,
                                    service_options(explain_flags));
      const auto r = service.handle("POST", path, request.dump());
      write_out(explain_flags.format == "md" ? explain_markdown(method, r.body)
                                             : r.body.dump(2) + "\n",
                output);
      if (r.status != 200) {
        std::cerr << "fatkit: " << r.body.value("error", "request failed") << "\n";
        return 1;
      }
      return 0;
    }

    if (serve->parsed()) {
      finish(serve_flags);
      auto dataset = fatkit::load_dataset(serve_flags.inputs);
      auto model = fatkit::build_model(serve_flags.inputs, dataset);
      const fatkit::Service service(std::move(dataset), std::move(model), serve_flags.inputs,
                                    service_options(serve_flags));
      std::optional<std::filesystem::path> asset_dir;
      if (!assets.empty()) asset_dir = assets;
      fatkit::HttpService http(service, asset_dir);
      const int bound = http.bind(host, port);
      std::cerr << "fatkit: serving on http://" << host << ":" << bound << " (digest "
                << service.digest() << ")\n";
      g_server = &http;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      http.listen();
      g_server = nullptr;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "fatkit: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
