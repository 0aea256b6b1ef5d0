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

#include "fatkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fatkit/errors.hpp"

namespace fatkit {

std::size_t argmax(std::span<const double> distribution) {
  if (distribution.empty()) throw ArgumentError("argmax of an empty distribution");
  return static_cast<std::size_t>(std::max_element(distribution.begin(), distribution.end()) -
                                  distribution.begin());
}

PredictionBatch Model::predict_proba(const RowMatrix&) const {
  throw UnsupportedError(kind() + " model does not provide probabilities");
}

PredictionBatch Model::predict_one(std::span<const double> row) const {
  RowMatrix m(row.size());
  m.push_back(row);
  return predict(m);
}

void require_trainable(const Dataset& dataset) {
  if (dataset.rows() == 0) throw TrainingError("cannot fit on an empty dataset");
  if (dataset.classes().size() < 2) {
    throw TrainingError("training data must contain at least two classes");
  }
}

namespace {

std::vector<std::size_t> label_indices(const Dataset& dataset,
                                       const std::vector<std::string>& classes) {
  std::vector<std::size_t> out(dataset.rows());
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    out[r] = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), dataset.label(r)) - classes.begin());
  }
  return out;
}

void require_fitted(const Model& m) {
  if (!m.fitted()) throw StateError(m.kind() + " model used before fit");
}

void require_width(const RowMatrix& rows, std::size_t width) {
  if (!rows.empty() && rows.cols() != width) {
    throw SchemaError("rows have " + std::to_string(rows.cols()) + " columns, model expects " +
                      std::to_string(width));
  }
}

PredictionBatch from_distributions(std::vector<std::vector<double>> dist,
                                   const std::vector<std::string>& classes, bool keep) {
  PredictionBatch out;
  out.predictions.reserve(dist.size());
  for (const auto& d : dist) out.predictions.push_back(classes[argmax(d)]);
  if (keep) out.probabilities = std::move(dist);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- k-NN

KnnClassifier::KnnClassifier(std::size_t k) : k_(k) {
  if (k_ == 0) throw ArgumentError("k-NN needs k >= 1");
}

void KnnClassifier::fit(const Dataset& dataset) {
  require_trainable(dataset);
  schema_ = dataset.schema();
  classes_ = dataset.classes();
  labels_ = label_indices(dataset, classes_);
  std::vector<std::size_t> all(schema_.size());
  std::iota(all.begin(), all.end(), 0);
  reference_ = kernels::make_block(dataset.features(), schema_, all);
  fitted_ = true;
}

std::vector<std::vector<double>> KnnClassifier::votes(const RowMatrix& rows) const {
  require_fitted(*this);
  require_width(rows, schema_.size());
  const std::size_t n_ref = reference_.rows;
  const std::size_t k = std::min(k_, n_ref);
  std::vector<double> dist(n_ref);
  std::vector<std::size_t> order(n_ref);
  std::vector<std::vector<double>> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    kernels::gower_to_many(reference_, rows.row(r), dist);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                      });
    std::vector<double> v(classes_.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) v[labels_[order[i]]] += 1.0;
    for (auto& x : v) x /= static_cast<double>(k);
    out.push_back(std::move(v));
  }
  return out;
}

PredictionBatch KnnClassifier::predict(const RowMatrix& rows) const {
  return from_distributions(votes(rows), classes_, false);
}

PredictionBatch KnnClassifier::predict_proba(const RowMatrix& rows) const {
  return from_distributions(votes(rows), classes_, true);
}

// ---------------------------------------------------------------- logistic

LogisticRegression::LogisticRegression() : LogisticRegression(Params{}) {}

LogisticRegression::LogisticRegression(Params params) : params_(params) {
  if (!(params_.learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
}

std::vector<double> LogisticRegression::encode(std::span<const double> row) const {
  std::vector<double> x(width_ + 1, 0.0);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& col = schema_.column(c);
    if (col.numeric()) {
      x[pos++] = scale_[c] > 0.0 ? (row[c] - mean_[c]) / scale_[c] : 0.0;
    } else {
      x[pos + static_cast<std::size_t>(row[c])] = 1.0;
      pos += col.values.size();
    }
  }
  x[width_] = 1.0;
  return x;
}

std::vector<double> LogisticRegression::softmax_row(std::span<const double> x) const {
  const std::size_t k = classes_.size();
  std::vector<double> z(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double* w = weights_.data() + c * (width_ + 1);
    double s = 0.0;
    for (std::size_t j = 0; j <= width_; ++j) s += w[j] * x[j];
    z[c] = s;
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

void LogisticRegression::fit(const Dataset& dataset) {
  require_trainable(dataset);
  schema_ = dataset.schema();
  classes_ = dataset.classes();
  const std::size_t n = dataset.rows();
  const std::size_t k = classes_.size();
  mean_.assign(schema_.size(), 0.0);
  scale_.assign(schema_.size(), 0.0);
  width_ = 0;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& col = schema_.column(c);
    if (col.numeric()) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += dataset.features()(r, c);
      mean_[c] = s / static_cast<double>(n);
      double v = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = dataset.features()(r, c) - mean_[c];
        v += d * d;
      }
      scale_[c] = std::sqrt(v / static_cast<double>(n));
      width_ += 1;
    } else {
      width_ += col.values.size();
    }
  }
  const auto labels = label_indices(dataset, classes_);
  const std::size_t stride = width_ + 1;
  RowMatrix x(stride);
  x.reserve(n);
  weights_.assign(k * stride, 0.0);
  fitted_ = true;  // encode() needs the layout above
  for (std::size_t r = 0; r < n; ++r) x.push_back(encode(dataset.row(r)));

  std::vector<double> grad(k * stride);
  for (std::size_t epoch = 0; epoch < params_.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto xr = x.row(r);
      auto p = softmax_row(xr);
      p[labels[r]] -= 1.0;
      for (std::size_t c = 0; c < k; ++c) {
        double* g = grad.data() + c * stride;
        for (std::size_t j = 0; j < stride; ++j) g[j] += p[c] * xr[j];
      }
    }
    const double step = params_.learning_rate / static_cast<double>(n);
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] -= step * grad[i];
  }
}

PredictionBatch LogisticRegression::predict(const RowMatrix& rows) const {
  auto out = predict_proba(rows);
  out.probabilities.reset();
  return out;
}

PredictionBatch LogisticRegression::predict_proba(const RowMatrix& rows) const {
  require_fitted(*this);
  require_width(rows, schema_.size());
  std::vector<std::vector<double>> dist;
  dist.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) dist.push_back(softmax_row(encode(rows.row(r))));
  return from_distributions(std::move(dist), classes_, true);
}

// ---------------------------------------------------------------- tree

DecisionTreeClassifier::DecisionTreeClassifier(int max_depth) : max_depth_(max_depth) {
  if (max_depth_ < 1) throw ArgumentError("tree depth must be >= 1");
}

void DecisionTreeClassifier::fit(const Dataset& dataset) {
  require_trainable(dataset);
  classes_ = dataset.classes();
  const auto labels = label_indices(dataset, classes_);
  std::vector<FeatureKind> kinds;
  for (const auto& c : dataset.schema().columns()) kinds.push_back(c.kind);
  tree_ = CartTree::fit(dataset.features(), kinds, labels, classes_.size(), {},
                        CartParams{max_depth_, 1});
  fitted_ = true;
}

const CartTree& DecisionTreeClassifier::tree() const {
  require_fitted(*this);
  return tree_;
}

PredictionBatch DecisionTreeClassifier::predict(const RowMatrix& rows) const {
  auto out = predict_proba(rows);
  out.probabilities.reset();
  return out;
}

PredictionBatch DecisionTreeClassifier::predict_proba(const RowMatrix& rows) const {
  require_fitted(*this);
  require_width(rows, tree_.features());
  std::vector<std::vector<double>> dist;
  dist.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto d = tree_.distribution(rows.row(r));
    dist.emplace_back(d.begin(), d.end());
  }
  return from_distributions(std::move(dist), classes_, true);
}

// ---------------------------------------------------------------- remote

RemoteModel::RemoteModel(std::string endpoint, FeatureSchema schema,
                         std::vector<std::string> classes, bool expect_probabilities,
                         std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      schema_(std::move(schema)),
      classes_(std::move(classes)),
      expect_probabilities_(expect_probabilities),
      timeout_(timeout) {
  if (classes_.empty()) throw ArgumentError("remote model needs a class list");
  if (endpoint_.rfind("http://", 0) != 0) {
    throw ArgumentError("remote endpoint must be an http:// URL");
  }
}

void RemoteModel::fit(const Dataset&) {
  throw UnsupportedError("remote models are fitted elsewhere; fit is not supported");
}

PredictionBatch RemoteModel::call(const RowMatrix& rows) const {
  if (rows.rows() == 0) {
    PredictionBatch empty;
    if (expect_probabilities_) empty.probabilities.emplace();
    return empty;
  }
  require_width(rows, schema_.size());

  // http://host[:port][/base]
  const auto after_scheme = endpoint_.find("://") + 3;
  const auto slash = endpoint_.find('/', after_scheme);
  const std::string origin = endpoint_.substr(0, slash);
  std::string base = slash == std::string::npos ? "" : endpoint_.substr(slash);
  while (!base.empty() && base.back() == '/') base.pop_back();

  nlohmann::json body;
  auto& jrows = body["rows"] = nlohmann::json::array();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    nlohmann::json jr = nlohmann::json::array();
    const auto row = rows.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& col = schema_.column(c);
      if (col.numeric()) {
        jr.push_back(row[c]);
      } else {
        jr.push_back(col.values.at(static_cast<std::size_t>(row[c])));
      }
    }
    jrows.push_back(std::move(jr));
  }

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(base + "/predict", body.dump(), "application/json");
  if (!res) {
    throw RemoteModelError("request to " + endpoint_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw RemoteModelError("remote model answered HTTP " + std::to_string(res->status));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw RemoteModelError(std::string("remote reply is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("predictions") || !reply["predictions"].is_array()) {
    throw RemoteModelError("remote reply lacks a 'predictions' array");
  }
  const auto& jp = reply["predictions"];
  if (jp.size() != rows.rows()) {
    throw RemoteModelError("remote reply has " + std::to_string(jp.size()) +
                           " predictions for " + std::to_string(rows.rows()) + " rows");
  }
  PredictionBatch out;
  for (const auto& p : jp) {
    if (!p.is_string()) throw RemoteModelError("remote prediction is not a string");
    auto token = p.get<std::string>();
    if (std::find(classes_.begin(), classes_.end(), token) == classes_.end()) {
      throw RemoteModelError("remote prediction '" + token + "' is not a known class");
    }
    out.predictions.push_back(std::move(token));
  }
  if (reply.contains("probabilities") && !reply["probabilities"].is_null()) {
    const auto& jq = reply["probabilities"];
    if (!jq.is_array() || jq.size() != rows.rows()) {
      throw RemoteModelError("remote probabilities do not match the row count");
    }
    std::vector<std::vector<double>> probs;
    for (std::size_t r = 0; r < jq.size(); ++r) {
      const auto& jr = jq[r];
      if (!jr.is_array() || jr.size() != classes_.size()) {
        throw RemoteModelError("remote probability row has the wrong width");
      }
      std::vector<double> d;
      double sum = 0.0;
      for (const auto& v : jr) {
        if (!v.is_number()) throw RemoteModelError("remote probability is not a number");
        d.push_back(v.get<double>());
        if (!(d.back() >= 0.0)) throw RemoteModelError("negative remote probability");
        sum += d.back();
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw RemoteModelError("remote probabilities do not sum to 1");
      }
      if (classes_[argmax(d)] != out.predictions[r]) {
        throw RemoteModelError("remote prediction disagrees with its probabilities");
      }
      probs.push_back(std::move(d));
    }
    out.probabilities = std::move(probs);
  } else if (expect_probabilities_) {
    throw RemoteModelError("remote reply lacks probabilities");
  }
  return out;
}

PredictionBatch RemoteModel::predict(const RowMatrix& rows) const {
  auto out = call(rows);
  out.probabilities.reset();
  return out;
}

PredictionBatch RemoteModel::predict_proba(const RowMatrix& rows) const {
  if (!expect_probabilities_) {
    throw UnsupportedError("remote model was not configured with probabilities");
  }
  return call(rows);
}

std::unique_ptr<Model> make_builtin(const ModelSpec& spec) {
  if (spec.kind == "tree") return std::make_unique<DecisionTreeClassifier>(spec.max_depth);
  if (spec.kind == "knn") return std::make_unique<KnnClassifier>(spec.neighbours);
  if (spec.kind == "logistic") {
    return std::make_unique<LogisticRegression>(
        LogisticRegression::Params{spec.learning_rate, spec.epochs});
  }
  throw ArgumentError("unknown model kind '" + spec.kind + "' (expected knn, logistic or tree)");
}

}  // namespace fatkit
