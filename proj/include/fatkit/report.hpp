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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatkit/app.hpp"
#include "fatkit/counterfactual.hpp"
#include "fatkit/density.hpp"
#include "fatkit/model.hpp"
#include "fatkit/surrogate.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

// Report sections in output order.
const std::vector<std::string>& section_names();

struct AuditOptions {
  Inputs inputs;
  std::vector<std::string> sections;  // empty = all
  std::size_t density_rows = 10000;   // reference sample: the first rows
  DensityOptions density;
  double density_threshold = kSparseThreshold;
  std::size_t counterfactual_instances = 5;  // sparsest flagged rows
  CounterfactualConfig counterfactual;
  SurrogateConfig surrogate;  // run globally, once with a tree and once with ridge
  int surrogate_tree_depth = 3;
  std::size_t systemic_pairs_listed = 20;
};

// The full configuration the digest is taken over.
nlohmann::json audit_config_json(const AuditOptions& options, const FeatureSchema& schema);

struct AuditResult {
  nlohmann::json report;
  std::size_t flag_count = 0;  // disparity flags plus systemic-bias pairs

  bool flagged() const noexcept { return flag_count > 0; }
  // 0 clean, 2 when any disparity or systemic-bias flag was raised.
  int exit_code() const noexcept { return flagged() ? 2 : 0; }
};

// {metadata: {...}, body: {config, summary, sections}}. The body depends only
// on the inputs and seed; generated_at lives in the metadata.
AuditResult run_audit(const Dataset& dataset, const Model& model, const AuditOptions& options,
                      const std::string& generated_at);

// Markdown view of a report produced by run_audit.
std::string render_markdown(const nlohmann::json& report);

}  // namespace fatkit
