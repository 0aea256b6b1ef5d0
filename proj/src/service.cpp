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

#include "fatkit/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>

#include "fatkit/counterfactual.hpp"
#include "fatkit/csv.hpp"
#include "fatkit/errors.hpp"
#include "fatkit/fairness.hpp"
#include "fatkit/grouping.hpp"
#include "fatkit/serialize.hpp"
#include "fatkit/surrogate.hpp"

namespace fatkit {

namespace {

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

void allow_keys(const json& j, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ArgumentError("request body must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ArgumentError("unknown request field '" + k + "'");
    }
  }
}

const json& need(const json& j, const char* key) {
  if (!j.contains(key)) throw ArgumentError(std::string("request needs '") + key + "'");
  return j.at(key);
}

std::string need_string(const json& j, const char* key) {
  const auto& v = need(j, key);
  if (!v.is_string()) throw ArgumentError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

double tolerance_of(const json& j, double fallback) {
  if (!j.contains("tolerance") || j.at("tolerance").is_null()) return fallback;
  if (!j.at("tolerance").is_number()) throw ArgumentError("'tolerance' must be a number");
  return j.at("tolerance").get<double>();
}

GroupPartition request_partition(const Dataset& dataset, const json& j) {
  const auto feature = need_string(j, "feature");
  const auto& col = dataset.schema().column(dataset.schema().require_index(feature));
  if (j.contains("thresholds") && !j.at("thresholds").is_null()) {
    return partition(dataset, feature, j.at("thresholds").get<std::vector<double>>());
  }
  if (col.numeric()) return partition(dataset, feature, quartile_thresholds(dataset, feature));
  return partition(dataset, feature);
}

}  // namespace

Service::Service(Dataset dataset, std::unique_ptr<Model> model, Inputs inputs,
                 ServiceOptions options)
    : dataset_(std::move(dataset)),
      model_(std::move(model)),
      inputs_(std::move(inputs)),
      options_(std::move(options)) {
  if (!model_ || !model_->fitted()) throw StateError("service needs a fitted model");
  const auto rows = std::min(options_.density_rows, dataset_.rows());
  if (rows > options_.density.neighbour) {
    density_ = DensityEstimator::fit(dataset_.head(rows), options_.density);
  }
  training_predictions_ = model_->predict(dataset_.features());
  positive_ = positive_class(inputs_, *model_);
  config_ = {{"inputs", inputs_json(inputs_)},
             {"density",
              {{"n", options_.density.neighbour},
               {"metric", to_string(options_.density.metric)},
               {"features", options_.density.features},
               {"reference_rows", options_.density_rows},
               {"threshold", options_.density_threshold}}}};
  digest_ = config_digest(config_);
}

Service::Response Service::handle(const std::string& method, const std::string& path,
                                  const std::string& body) const {
  Response r;
  try {
    json request = json::object();
    if (method == "POST") {
      try {
        request = body.empty() ? json::object() : json::parse(body);
      } catch (const json::parse_error& e) {
        throw ArgumentError(std::string("request body is not valid JSON: ") + e.what());
      }
    }
    r.body = route(method, path, request);
  } catch (const HttpError& e) {
    r.status = e.status();
    r.body = {{"error", e.what()}};
  } catch (const SchemaError& e) {
    r.status = 400;
    r.body = {{"error", e.what()}, {"type", "schema"}};
  } catch (const ArgumentError& e) {
    r.status = 400;
    r.body = {{"error", e.what()}, {"type", "argument"}};
  } catch (const UnsupportedError& e) {
    r.status = 400;
    r.body = {{"error", e.what()}, {"type", "unsupported"}};
  } catch (const FitError& e) {
    r.status = 422;
    r.body = {{"error", e.what()}, {"type", "fit"}};
  } catch (const StateError& e) {
    r.status = 409;
    r.body = {{"error", e.what()}, {"type", "state"}};
  } catch (const RemoteModelError& e) {
    r.status = 502;
    r.body = {{"error", e.what()}, {"type", "remote_model"}};
  } catch (const json::exception& e) {
    r.status = 400;
    r.body = {{"error", e.what()}, {"type", "argument"}};
  } catch (const std::exception& e) {
    r.status = 500;
    r.body = {{"error", e.what()}};
  }
  r.body["digest"] = digest_;
  return r;
}

json Service::route(const std::string& method, const std::string& path,
                    const json& request) const {
  const auto& schema = dataset_.schema();
  if (method == "GET") {
    if (path == "/api/health") return {{"status", "ok"}};
    if (path == "/api/dataset/summary") {
      return {{"schema", schema_to_json(schema)},
              {"classes", dataset_.classes()},
              {"model_classes", model_->classes()},
              {"positive_class", positive_},
              {"summary", summary_json(summarize(dataset_))}};
    }
    constexpr std::string_view prefix = "/api/instance/";
    if (path.starts_with(prefix)) {
      const auto digits = std::string_view(path).substr(prefix.size());
      std::size_t i = 0;
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
      if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty()) {
        throw ArgumentError("instance index must be a non-negative integer");
      }
      if (i >= dataset_.rows()) {
        throw HttpError(404, "instance " + std::to_string(i) + " is out of range (" +
                                 std::to_string(dataset_.rows()) + " rows)");
      }
      return {{"index", i},
              {"row", row_json(schema, dataset_.row(i))},
              {"label", dataset_.label(i)},
              {"prediction", training_predictions_.predictions[i]}};
    }
    throw HttpError(404, "no route for GET " + path);
  }
  if (method != "POST") throw HttpError(405, "method not allowed");

  if (path == "/api/predict") {
    allow_keys(request, {"row"});
    const auto row = row_from_json(schema, need(request, "row"));
    const auto batch =
        model_->supports_proba() ? model_->predict_proba(RowMatrix(schema.size(), row))
                                 : model_->predict(RowMatrix(schema.size(), row));
    json out = prediction_json(*model_, batch, 0);
    if (density_) {
      const double s = density_->score(row);
      out["density"] = {{"score", s},
                        {"robust", s <= options_.density_threshold},
                        {"threshold", options_.density_threshold}};
    } else {
      out["density"] = nullptr;
    }
    return out;
  }
  if (path == "/api/counterfactuals") {
    allow_keys(request, {"row", "config", "feasibility"});
    const auto row = row_from_json(schema, need(request, "row"));
    const auto config = counterfactual_config_from_json(
        schema, request.contains("config") ? request.at("config") : json::object());
    auto search = find_counterfactuals(*model_, dataset_, row, config);
    const bool rerank = request.contains("feasibility") && request.at("feasibility").get<bool>();
    if (density_) {
      if (rerank) score_feasibility(search.counterfactuals, *density_);
      else annotate_density(search.counterfactuals, *density_);
    } else if (rerank) {
      throw StateError("feasibility ranking needs a density estimator");
    }
    return search_json(schema, search, config.mode);
  }
  if (path == "/api/fairness") {
    allow_keys(request, {"feature", "criterion", "tolerance", "thresholds"});
    const auto p = request_partition(dataset_, request);
    const auto m = group_fairness(p, dataset_.labels(), training_predictions_.predictions,
                                  parse_criterion(need_string(request, "criterion")), positive_,
                                  tolerance_of(request, inputs_.tolerance));
    return {{"partition", partition_json(p)},
            {"positive_class", positive_},
            {"matrix", disparity_json(m)}};
  }
  if (path == "/api/performance") {
    allow_keys(request, {"feature", "metric", "tolerance", "thresholds"});
    const auto p = request_partition(dataset_, request);
    const auto m = performance_disparity(p, dataset_.labels(), training_predictions_.predictions,
                                         parse_metric(need_string(request, "metric")), positive_,
                                         tolerance_of(request, inputs_.tolerance));
    return {{"partition", partition_json(p)},
            {"positive_class", positive_},
            {"matrix", disparity_json(m)}};
  }
  if (path == "/api/surrogate") {
    allow_keys(request, {"row", "config"});
    auto config =
        surrogate_config_from_json(request.contains("config") ? request.at("config") : json::object());
    if (!request.contains("config") || !request.at("config").contains("seed")) {
      config.seed = inputs_.seed;
    }
    std::optional<std::vector<double>> row;
    if (request.contains("row") && !request.at("row").is_null()) {
      row = row_from_json(schema, request.at("row"));
    }
    std::optional<std::span<const double>> inst;
    if (row) inst = std::span<const double>(*row);
    return explanation_json(explain(*model_, dataset_, inst, config));
  }
  if (path == "/api/ice-pd") {
    allow_keys(request, {"feature", "grid", "class"});
    const auto feature = need_string(request, "feature");
    const auto f = schema.require_index(feature);
    std::vector<double> grid;
    if (request.contains("grid") && !request.at("grid").is_null()) {
      if (!request.at("grid").is_array()) throw ArgumentError("'grid' must be a list");
      for (const auto& v : request.at("grid")) grid.push_back(cell_from_json(schema.column(f), v));
    } else {
      grid = default_grid(dataset_, f);
    }
    std::optional<std::string> cls;
    if (request.contains("class") && !request.at("class").is_null()) {
      cls = need_string(request, "class");
    }
    return ice_pd_json(schema, ice_pd(*model_, dataset_, feature, grid, cls));
  }
  if (path == "/api/density") {
    allow_keys(request, {"row"});
    if (!density_) throw StateError("dataset too small for the density estimator");
    const auto row = row_from_json(schema, need(request, "row"));
    const double raw = density_->raw_score(row);
    const double s = density_->normalize(raw);
    return {{"score", s},
            {"raw", raw},
            {"robust", s <= options_.density_threshold},
            {"n", density_->neighbour()},
            {"threshold", options_.density_threshold}};
  }
  throw HttpError(404, "no route for POST " + path);
}

HttpService::HttpService(const Service& service, std::optional<std::filesystem::path> assets)
    : server_(std::make_unique<httplib::Server>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(R"(/api/.*)", handler);
  server_->Post(R"(/api/.*)", handler);
  if (assets) {
    if (!server_->set_mount_point("/", assets->string())) {
      throw ArgumentError("asset directory '" + assets->string() + "' does not exist");
    }
  }
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port < 0 || port > 65535) throw ArgumentError("port must be in 0..65535");
  if (port == 0) {
    const int p = server_->bind_to_any_port(host);
    if (p < 0) throw Error("could not bind " + host);
    return p;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("could not bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace fatkit
