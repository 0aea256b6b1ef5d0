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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fatkit {

enum class FeatureKind { numeric, categorical };

std::string_view to_string(FeatureKind kind);

// One feature column. Numeric columns carry the observed [min, max] range,
// categorical columns the ordered value-set; a categorical cell is stored as
// its index into `values`.
struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> values;

  bool numeric() const noexcept { return kind == FeatureKind::numeric; }
  bool categorical() const noexcept { return kind == FeatureKind::categorical; }
  std::optional<std::size_t> code_of(std::string_view token) const;

  bool operator==(const Column&) const = default;
};

// Ordered feature columns plus the names of the target and protected columns.
// The target is not one of `columns()`.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<Column> columns, std::string target,
                std::vector<std::string> protected_features = {});

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  std::size_t size() const noexcept { return columns_.size(); }
  const std::string& target() const noexcept { return target_; }
  const std::vector<std::string>& protected_features() const noexcept {
    return protected_;
  }

  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws SchemaError for unknown names.
  std::size_t require_index(std::string_view name) const;
  std::vector<std::size_t> require_indices(
      std::span<const std::string> names) const;

  FeatureSchema with_protected(std::vector<std::string> protected_features) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<Column> columns_;
  std::string target_;
  std::vector<std::string> protected_;
};

// Dense row-major block of encoded rows.
class RowMatrix {
 public:
  RowMatrix() = default;
  explicit RowMatrix(std::size_t cols) : cols_(cols) {}
  RowMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : cols_(cols), data_(rows * cols, fill) {}
  RowMatrix(std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  void push_back(std::span<const double> row);
  void reserve(std::size_t rows) { data_.reserve(rows * cols_); }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const RowMatrix&) const = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Immutable rectangular table: encoded feature cells plus class labels.
class Dataset {
 public:
  Dataset() = default;
  // Validates shape and every cell against the schema (SchemaError).
  Dataset(FeatureSchema schema, RowMatrix features, std::vector<std::string> labels);

  const FeatureSchema& schema() const noexcept { return schema_; }
  const RowMatrix& features() const noexcept { return features_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return schema_.size(); }
  std::span<const double> row(std::size_t i) const { return features_.row(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  // Sorted distinct labels.
  std::vector<std::string> classes() const;

  Dataset head(std::size_t n) const;
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_schema(FeatureSchema schema) const;

  bool operator==(const Dataset&) const = default;

 private:
  FeatureSchema schema_;
  RowMatrix features_;
  std::vector<std::string> labels_;
};

// A user-facing cell: number for numeric columns, token for categorical ones.
using Cell = std::variant<double, std::string>;

std::vector<double> encode_row(const FeatureSchema& schema, std::span<const Cell> cells);
std::vector<Cell> decode_row(const FeatureSchema& schema, std::span<const double> row);
double encode_cell(const Column& column, const Cell& cell);
Cell decode_cell(const Column& column, double value);
// Text form of a cell; numbers use the shortest round-trip representation.
std::string cell_text(const Column& column, double value);

// Shortest representation that parses back to the same double.
std::string format_number(double value);
// Whole-token parse; rejects non-finite values and surrounding junk.
std::optional<double> parse_number(std::string_view token);

// Contribution of one feature to the Gower-style distance, in [0, 1].
double feature_distance(const Column& column, double a, double b);

// Mean per-feature distance over all features.
double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema);
// Mean over the given feature subset; an empty subset is an ArgumentError.
double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema, std::span<const std::size_t> features);

struct NumericSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

struct ColumnSummary {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::optional<NumericSummary> numeric;  // absent for 0 rows
  std::vector<std::pair<std::string, std::size_t>> counts;  // categorical only
};

struct DatasetSummary {
  std::size_t rows = 0;
  std::vector<ColumnSummary> columns;
  std::vector<std::pair<std::string, double>> class_distribution;  // sorted by class
};

DatasetSummary summarize(const Dataset& dataset);

// Nearest-rank quantile of an ascending-sorted, non-empty sample:
// element ceil(p * n) (1-based), p in (0, 1]; p = 0 returns the minimum.
double nearest_rank(std::span<const double> sorted, double p);

}  // namespace fatkit
