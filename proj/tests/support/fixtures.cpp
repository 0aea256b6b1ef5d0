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

#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fatkit::testing {

Column numeric(std::string name, double min, double max) {
  Column c;
  c.name = std::move(name);
  c.kind = FeatureKind::numeric;
  c.min = min;
  c.max = max;
  return c;
}

Column categorical(std::string name, std::vector<std::string> values) {
  Column c;
  c.name = std::move(name);
  c.kind = FeatureKind::categorical;
  c.values = std::move(values);
  return c;
}

Dataset make_dataset(std::vector<Column> columns, const std::vector<std::vector<Cell>>& rows,
                     std::vector<std::string> labels, std::vector<std::string> protected_features,
                     std::string target) {
  FeatureSchema schema(std::move(columns), std::move(target), std::move(protected_features));
  RowMatrix x(schema.size());
  for (const auto& r : rows) x.push_back(encode_row(schema, r));
  return Dataset(std::move(schema), std::move(x), std::move(labels));
}

FunctionModel::FunctionModel(std::vector<std::string> classes, Predict predict, Proba proba)
    : classes_(std::move(classes)), predict_(std::move(predict)), proba_(std::move(proba)) {}

PredictionBatch FunctionModel::predict(const RowMatrix& rows) const {
  PredictionBatch out;
  out.predictions.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    if (proba_) {
      out.predictions.push_back(classes_[argmax(proba_(rows.row(r)))]);
    } else {
      out.predictions.push_back(predict_(rows.row(r)));
    }
  }
  return out;
}

PredictionBatch FunctionModel::predict_proba(const RowMatrix& rows) const {
  if (!proba_) return Model::predict_proba(rows);
  PredictionBatch out = predict(rows);
  std::vector<std::vector<double>> p;
  for (std::size_t r = 0; r < rows.rows(); ++r) p.push_back(proba_(rows.row(r)));
  out.probabilities = std::move(p);
  return out;
}

FunctionModel threshold_model() {
  return FunctionModel({"0", "1"},
                       [](std::span<const double> x) { return x[0] > 0.25 ? "1" : "0"; });
}

FunctionModel constant_model(std::string cls, std::vector<std::string> classes) {
  return FunctionModel(std::move(classes), [cls](std::span<const double>) { return cls; });
}

Dataset two_moons(std::size_t n, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> jitter(0.0, noise);
  RowMatrix x(2);
  std::vector<std::string> labels;
  double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const bool upper = i % 2 == 0;
    const double t = angle(rng);
    double a = upper ? std::cos(t) : 1.0 - std::cos(t);
    double b = upper ? std::sin(t) : 0.5 - std::sin(t);
    a += jitter(rng);
    b += jitter(rng);
    const double row[2] = {a, b};
    x.push_back(row);
    labels.push_back(upper ? "0" : "1");
    lo0 = std::min(lo0, a);
    hi0 = std::max(hi0, a);
    lo1 = std::min(lo1, b);
    hi1 = std::max(hi1, b);
  }
  FeatureSchema schema({numeric("x1", lo0, hi0), numeric("x2", lo1, hi1)}, "y");
  return Dataset(std::move(schema), std::move(x), std::move(labels));
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t n_numeric,
                       std::size_t n_categorical, std::vector<std::string> classes) {
  std::vector<Column> cols;
  std::vector<int> levels;
  for (std::size_t i = 0; i < n_numeric; ++i) {
    cols.push_back(numeric("n" + std::to_string(i), 0.0, 9.0));
  }
  for (std::size_t i = 0; i < n_categorical; ++i) {
    const int k = std::uniform_int_distribution<int>(2, 4)(rng);
    std::vector<std::string> values;
    for (int v = 0; v < k; ++v) values.push_back(std::string(1, static_cast<char>('a' + v)));
    cols.push_back(categorical("c" + std::to_string(i), std::move(values)));
    levels.push_back(k);
  }
  FeatureSchema schema(std::move(cols), "y");
  RowMatrix x(schema.size());
  std::vector<std::string> labels;
  std::uniform_int_distribution<int> grid(0, 9);
  std::uniform_int_distribution<std::size_t> pick(0, classes.size() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row;
    for (std::size_t i = 0; i < n_numeric; ++i) row.push_back(grid(rng));
    for (std::size_t i = 0; i < n_categorical; ++i) {
      row.push_back(std::uniform_int_distribution<int>(0, levels[i] - 1)(rng));
    }
    x.push_back(row);
    labels.push_back(classes[pick(rng)]);
  }
  return Dataset(std::move(schema), std::move(x), std::move(labels));
}

}  // namespace fatkit::testing
