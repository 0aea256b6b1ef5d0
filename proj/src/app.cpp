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

#include "fatkit/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <cstdio>

#include "fatkit/csv.hpp"
#include "fatkit/errors.hpp"

namespace fatkit {

Dataset load_dataset(const Inputs& inputs) {
  if (inputs.data.empty()) throw ArgumentError("no dataset path given");
  std::optional<FeatureSchema> schema;
  std::string target = inputs.target;
  if (inputs.schema) {
    schema = load_schema(*inputs.schema);
    if (target.empty()) target = schema->target();
    if (target != schema->target()) {
      throw ArgumentError("target '" + target + "' differs from the schema target '" +
                          schema->target() + "'");
    }
  }
  if (target.empty()) throw ArgumentError("no target column given");
  auto dataset = load_csv(inputs.data, schema, target);
  if (!inputs.protected_features.empty()) {
    dataset = dataset.with_schema(dataset.schema().with_protected(inputs.protected_features));
  }
  return dataset;
}

std::unique_ptr<Model> build_model(const Inputs& inputs, const Dataset& dataset) {
  if (inputs.remote_url) {
    return std::make_unique<RemoteModel>(*inputs.remote_url, dataset.schema(), dataset.classes(),
                                         inputs.remote_probabilities);
  }
  auto model = make_builtin(inputs.model);
  model->fit(dataset);
  return model;
}

std::string positive_class(const Inputs& inputs, const Model& model) {
  const auto& classes = model.classes();
  if (inputs.positive_class) {
    if (std::find(classes.begin(), classes.end(), *inputs.positive_class) == classes.end()) {
      throw ArgumentError("positive class '" + *inputs.positive_class + "' is not a model class");
    }
    return *inputs.positive_class;
  }
  if (classes.empty()) throw StateError("model has no classes");
  return classes.back();
}

nlohmann::json inputs_json(const Inputs& inputs) {
  nlohmann::json model;
  if (inputs.remote_url) {
    model = {{"kind", "remote"},
             {"url", *inputs.remote_url},
             {"probabilities", inputs.remote_probabilities}};
  } else {
    model = {{"kind", inputs.model.kind}};
    if (inputs.model.kind == "tree") model["max_depth"] = inputs.model.max_depth;
    if (inputs.model.kind == "knn") model["neighbours"] = inputs.model.neighbours;
    if (inputs.model.kind == "logistic") {
      model["learning_rate"] = inputs.model.learning_rate;
      model["epochs"] = inputs.model.epochs;
    }
  }
  return {{"data", inputs.data},
          {"schema", inputs.schema ? nlohmann::json(*inputs.schema) : nlohmann::json(nullptr)},
          {"target", inputs.target},
          {"protected", inputs.protected_features},
          {"model", model},
          {"seed", inputs.seed},
          {"tolerance", inputs.tolerance},
          {"positive_class", inputs.positive_class ? nlohmann::json(*inputs.positive_class)
                                                   : nlohmann::json(nullptr)}};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string out;
  char hex[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", md[i]);
    out += hex;
  }
  return out;
}

std::string config_digest(const nlohmann::json& config) { return sha256_hex(config.dump()); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fatkit
