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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatkit/fairness.hpp"
#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

// Inputs shared by every entry point: data, schema, model and seed.
struct Inputs {
  std::string data;
  std::optional<std::string> schema;
  std::string target;
  // Overrides the schema's protected list when non-empty.
  std::vector<std::string> protected_features;
  ModelSpec model;
  std::optional<std::string> remote_url;
  bool remote_probabilities = false;
  std::uint64_t seed = 42;
  double tolerance = kDefaultTolerance;
  std::optional<std::string> positive_class;
};

Dataset load_dataset(const Inputs& inputs);

// Fits a built-in model on the dataset, or connects to the remote one.
std::unique_ptr<Model> build_model(const Inputs& inputs, const Dataset& dataset);

// The configured positive class, or the model's last class.
std::string positive_class(const Inputs& inputs, const Model& model);

nlohmann::json inputs_json(const Inputs& inputs);

std::string sha256_hex(std::string_view bytes);
// SHA-256 of the compact dump of a configuration object.
std::string config_digest(const nlohmann::json& config);

// UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace fatkit
