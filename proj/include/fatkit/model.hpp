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

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fatkit/cart.hpp"
#include "fatkit/kernels/kernels.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit {

struct PredictionBatch {
  std::vector<std::string> predictions;
  // N x K, columns follow the model's class list.
  std::optional<std::vector<std::vector<double>>> probabilities;

  std::size_t size() const noexcept { return predictions.size(); }
};

// Index of the largest entry; ties go to the earliest class.
std::size_t argmax(std::span<const double> distribution);

// Black-box classifier contract: fit, predict and optionally predict_proba.
// After fit a model is immutable; predict must be re-entrant and row-wise
// pure (the prediction for a row depends on that row only).
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;
  virtual void fit(const Dataset& dataset) = 0;
  virtual bool fitted() const = 0;
  // Sorted distinct training labels (or the configured list for remote models).
  virtual const std::vector<std::string>& classes() const = 0;
  // Rows are encoded against the schema the model was fitted on.
  virtual PredictionBatch predict(const RowMatrix& rows) const = 0;
  virtual bool supports_proba() const { return false; }
  // Throws UnsupportedError unless supports_proba().
  virtual PredictionBatch predict_proba(const RowMatrix& rows) const;

  PredictionBatch predict_one(std::span<const double> row) const;
};

// Checks shared by built-ins at fit time: >= 1 row, >= 2 classes.
void require_trainable(const Dataset& dataset);

class KnnClassifier final : public Model {
 public:
  explicit KnnClassifier(std::size_t k = 3);

  std::string kind() const override { return "knn"; }
  void fit(const Dataset& dataset) override;
  bool fitted() const override { return fitted_; }
  const std::vector<std::string>& classes() const override { return classes_; }
  PredictionBatch predict(const RowMatrix& rows) const override;
  bool supports_proba() const override { return true; }
  PredictionBatch predict_proba(const RowMatrix& rows) const override;

  std::size_t k() const noexcept { return k_; }

 private:
  std::vector<std::vector<double>> votes(const RowMatrix& rows) const;

  std::size_t k_;
  bool fitted_ = false;
  FeatureSchema schema_;
  kernels::ReferenceBlock reference_;
  std::vector<std::size_t> labels_;
  std::vector<std::string> classes_;
};

// Multinomial logistic regression by full-batch gradient descent on
// z-scored numeric features and one-hot categorical features.
class LogisticRegression final : public Model {
 public:
  struct Params {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
  };

  LogisticRegression();
  explicit LogisticRegression(Params params);

  std::string kind() const override { return "logistic"; }
  void fit(const Dataset& dataset) override;
  bool fitted() const override { return fitted_; }
  const std::vector<std::string>& classes() const override { return classes_; }
  PredictionBatch predict(const RowMatrix& rows) const override;
  bool supports_proba() const override { return true; }
  PredictionBatch predict_proba(const RowMatrix& rows) const override;

 private:
  std::vector<double> encode(std::span<const double> row) const;
  std::vector<double> softmax_row(std::span<const double> row) const;

  Params params_;
  bool fitted_ = false;
  FeatureSchema schema_;
  std::vector<double> mean_, scale_;
  std::size_t width_ = 0;
  std::vector<double> weights_;  // K x (width + 1), bias last
  std::vector<std::string> classes_;
};

class DecisionTreeClassifier final : public Model {
 public:
  explicit DecisionTreeClassifier(int max_depth = 4);

  std::string kind() const override { return "tree"; }
  void fit(const Dataset& dataset) override;
  bool fitted() const override { return fitted_; }
  const std::vector<std::string>& classes() const override { return classes_; }
  PredictionBatch predict(const RowMatrix& rows) const override;
  bool supports_proba() const override { return true; }
  PredictionBatch predict_proba(const RowMatrix& rows) const override;

  int max_depth() const noexcept { return max_depth_; }
  const CartTree& tree() const;

 private:
  int max_depth_;
  bool fitted_ = false;
  CartTree tree_;
  std::vector<std::string> classes_;
};

// Model served over HTTP: POST {endpoint}/predict with
// {"rows": [[...]]} answered by {"predictions": [...], "probabilities": [[...]]?}.
// Always considered fitted; fit is unsupported. Each call opens its own
// connection.
class RemoteModel final : public Model {
 public:
  RemoteModel(std::string endpoint, FeatureSchema schema, std::vector<std::string> classes,
              bool expect_probabilities = false,
              std::chrono::milliseconds timeout = std::chrono::seconds(10));

  std::string kind() const override { return "remote"; }
  void fit(const Dataset& dataset) override;
  bool fitted() const override { return true; }
  const std::vector<std::string>& classes() const override { return classes_; }
  PredictionBatch predict(const RowMatrix& rows) const override;
  // With expect_probabilities the server must send probabilities; a reply
  // without them is a RemoteModelError.
  bool supports_proba() const override { return expect_probabilities_; }
  PredictionBatch predict_proba(const RowMatrix& rows) const override;

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  PredictionBatch call(const RowMatrix& rows) const;

  std::string endpoint_;
  FeatureSchema schema_;
  std::vector<std::string> classes_;
  bool expect_probabilities_;
  std::chrono::milliseconds timeout_;
};

struct ModelSpec {
  std::string kind = "tree";  // knn | logistic | tree
  int max_depth = 8;
  std::size_t neighbours = 3;
  double learning_rate = 0.1;
  std::size_t epochs = 500;
};

std::unique_ptr<Model> make_builtin(const ModelSpec& spec);

}  // namespace fatkit
