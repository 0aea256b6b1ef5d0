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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fatkit/model.hpp"
#include "fatkit/tabular.hpp"

namespace fatkit::testing {

Column numeric(std::string name, double min, double max);
Column categorical(std::string name, std::vector<std::string> values);

// Builds a dataset from decoded cells.
Dataset make_dataset(std::vector<Column> columns, const std::vector<std::vector<Cell>>& rows,
                     std::vector<std::string> labels, std::vector<std::string> protected_features = {},
                     std::string target = "y");

// Row-wise model backed by a function; optional class probabilities.
class FunctionModel final : public Model {
 public:
  using Predict = std::function<std::string(std::span<const double>)>;
  using Proba = std::function<std::vector<double>(std::span<const double>)>;

  FunctionModel(std::vector<std::string> classes, Predict predict, Proba proba = nullptr);

  std::string kind() const override { return "function"; }
  void fit(const Dataset&) override {}
  bool fitted() const override { return true; }
  const std::vector<std::string>& classes() const override { return classes_; }
  PredictionBatch predict(const RowMatrix& rows) const override;
  bool supports_proba() const override { return static_cast<bool>(proba_); }
  PredictionBatch predict_proba(const RowMatrix& rows) const override;

 private:
  std::vector<std::string> classes_;
  Predict predict_;
  Proba proba_;
};

// "1" iff feature 0 > 0.25.
FunctionModel threshold_model();
FunctionModel constant_model(std::string cls, std::vector<std::string> classes = {"0", "1"});

// Two interleaved half circles with gaussian noise, labels "0" and "1".
Dataset two_moons(std::size_t n, double noise, std::uint64_t seed);

// Random mixed dataset: `numeric` columns on a coarse grid, `categorical`
// columns with 2..4 values, labels drawn from `classes`.
Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t numeric,
                       std::size_t categorical, std::vector<std::string> classes = {"0", "1"});

}  // namespace fatkit::testing
