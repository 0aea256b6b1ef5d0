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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "fatkit/app.hpp"
#include "fatkit/density.hpp"
#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace httplib {
class Server;
}

namespace fatkit {

struct ServiceOptions {
  DensityOptions density;
  std::size_t density_rows = 10000;
  double density_threshold = kSparseThreshold;
};

// Read-only JSON API over one dataset and one model. Every response body
// carries the configuration digest.
class Service {
 public:
  Service(Dataset dataset, std::unique_ptr<Model> model, Inputs inputs,
          ServiceOptions options = {});

  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  // Routes one request; never throws.
  Response handle(const std::string& method, const std::string& path,
                  const std::string& body) const;

  const std::string& digest() const noexcept { return digest_; }
  const nlohmann::json& config() const noexcept { return config_; }
  const Dataset& dataset() const noexcept { return dataset_; }
  const Model& model() const noexcept { return *model_; }
  const std::optional<DensityEstimator>& density() const noexcept { return density_; }

 private:
  nlohmann::json route(const std::string& method, const std::string& path,
                       const nlohmann::json& request) const;

  Dataset dataset_;
  std::unique_ptr<Model> model_;
  Inputs inputs_;
  ServiceOptions options_;
  std::optional<DensityEstimator> density_;
  PredictionBatch training_predictions_;
  std::string positive_;
  nlohmann::json config_;
  std::string digest_;
};

// HTTP front end: /api/* routes plus static files from `assets` at "/".
class HttpService {
 public:
  explicit HttpService(const Service& service,
                       std::optional<std::filesystem::path> assets = std::nullopt);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void start();   // listen on a background thread
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace fatkit
