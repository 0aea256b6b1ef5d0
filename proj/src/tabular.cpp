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

#include "fatkit/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <system_error>
#include <unordered_set>

#include "fatkit/errors.hpp"

namespace fatkit {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::numeric ? "numeric" : "categorical";
}

std::optional<std::size_t> Column::code_of(std::string_view token) const {
  const auto it = std::find(values.begin(), values.end(), token);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

FeatureSchema::FeatureSchema(std::vector<Column> columns, std::string target,
                             std::vector<std::string> protected_features)
    : columns_(std::move(columns)),
      target_(std::move(target)),
      protected_(std::move(protected_features)) {
  std::unordered_set<std::string> names;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw SchemaError("column with empty name");
    if (!names.insert(c.name).second) throw SchemaError("duplicate column '" + c.name + "'");
    if (c.numeric() && !(c.min <= c.max)) {
      throw SchemaError("column '" + c.name + "' has min > max");
    }
    if (c.categorical()) {
      std::unordered_set<std::string> seen(c.values.begin(), c.values.end());
      if (seen.size() != c.values.size()) {
        throw SchemaError("column '" + c.name + "' has duplicate category values");
      }
    }
  }
  if (names.contains(target_)) {
    throw SchemaError("target '" + target_ + "' is also listed as a feature column");
  }
  std::unordered_set<std::string> prot;
  for (const auto& p : protected_) {
    if (p == target_) throw SchemaError("target '" + target_ + "' cannot be protected");
    if (!names.contains(p)) throw SchemaError("protected feature '" + p + "' is not a column");
    if (!prot.insert(p).second) throw SchemaError("protected feature '" + p + "' listed twice");
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw SchemaError("unknown feature '" + std::string(name) + "'");
}

std::vector<std::size_t> FeatureSchema::require_indices(
    std::span<const std::string> names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(require_index(n));
  return out;
}

FeatureSchema FeatureSchema::with_protected(std::vector<std::string> protected_features) const {
  return FeatureSchema(columns_, target_, std::move(protected_features));
}

RowMatrix::RowMatrix(std::size_t cols, std::vector<double> data)
    : cols_(cols), data_(std::move(data)) {
  if (cols_ == 0 ? !data_.empty() : data_.size() % cols_ != 0) {
    throw ArgumentError("row matrix data is not a multiple of the column count");
  }
}

void RowMatrix::push_back(std::span<const double> row) {
  if (row.size() != cols_) throw ArgumentError("row width does not match matrix width");
  data_.insert(data_.end(), row.begin(), row.end());
}

namespace {

void check_cell(const Column& column, double v, std::size_t row) {
  if (column.numeric()) {
    if (!std::isfinite(v)) {
      throw SchemaError("non-finite value in numeric column '" + column.name + "' at row " +
                        std::to_string(row));
    }
    return;
  }
  const bool valid_code = v >= 0.0 && v < static_cast<double>(column.values.size()) &&
                          v == std::floor(v);
  if (!valid_code) {
    throw SchemaError("invalid category code in column '" + column.name + "' at row " +
                      std::to_string(row));
  }
}

}  // namespace

Dataset::Dataset(FeatureSchema schema, RowMatrix features, std::vector<std::string> labels)
    : schema_(std::move(schema)), features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.cols() != schema_.size() && !(features_.empty() && labels_.empty())) {
    throw SchemaError("feature matrix width does not match schema");
  }
  if (features_.empty()) features_ = RowMatrix(schema_.size());
  if (features_.rows() != labels_.size()) {
    throw SchemaError("label count does not match row count");
  }
  for (std::size_t r = 0; r < features_.rows(); ++r) {
    const auto row = features_.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) check_cell(schema_.column(c), row[c], r);
  }
}

std::vector<std::string> Dataset::classes() const {
  std::set<std::string> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

Dataset Dataset::head(std::size_t n) const {
  n = std::min(n, rows());
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return subset(idx);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  RowMatrix m(cols());
  m.reserve(rows.size());
  std::vector<std::string> l;
  l.reserve(rows.size());
  for (auto r : rows) {
    m.push_back(row(r));
    l.push_back(labels_.at(r));
  }
  Dataset out;
  out.schema_ = schema_;
  out.features_ = std::move(m);
  out.labels_ = std::move(l);
  return out;
}

Dataset Dataset::with_schema(FeatureSchema schema) const {
  return Dataset(std::move(schema), features_, labels_);
}

double encode_cell(const Column& column, const Cell& cell) {
  if (column.numeric()) {
    if (const auto* d = std::get_if<double>(&cell)) {
      if (!std::isfinite(*d)) throw SchemaError("non-finite value for '" + column.name + "'");
      return *d;
    }
    const auto& s = std::get<std::string>(cell);
    if (auto v = parse_number(s)) return *v;
    throw SchemaError("value '" + s + "' is not numeric for column '" + column.name + "'");
  }
  std::string token;
  if (const auto* d = std::get_if<double>(&cell)) {
    token = format_number(*d);
  } else {
    token = std::get<std::string>(cell);
  }
  if (auto code = column.code_of(token)) return static_cast<double>(*code);
  throw SchemaError("value '" + token + "' is not in the value-set of '" + column.name + "'");
}

Cell decode_cell(const Column& column, double value) {
  if (column.numeric()) return value;
  return column.values.at(static_cast<std::size_t>(value));
}

std::string cell_text(const Column& column, double value) {
  if (column.numeric()) return format_number(value);
  return column.values.at(static_cast<std::size_t>(value));
}

std::vector<double> encode_row(const FeatureSchema& schema, std::span<const Cell> cells) {
  if (cells.size() != schema.size()) {
    throw SchemaError("row has " + std::to_string(cells.size()) + " cells, schema has " +
                      std::to_string(schema.size()) + " columns");
  }
  std::vector<double> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out[i] = encode_cell(schema.column(i), cells[i]);
  return out;
}

std::vector<Cell> decode_row(const FeatureSchema& schema, std::span<const double> row) {
  std::vector<Cell> out;
  out.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) out.push_back(decode_cell(schema.column(i), row[i]));
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;  // from_chars rejects a leading plus
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

double feature_distance(const Column& column, double a, double b) {
  if (column.categorical()) return a == b ? 0.0 : 1.0;
  const double range = column.max - column.min;
  if (!(range > 0.0)) return a == b ? 0.0 : 1.0;
  return std::min(std::abs(a - b) / range, 1.0);
}

double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema) {
  if (a.size() != schema.size() || b.size() != schema.size()) {
    throw ArgumentError("row width does not match schema");
  }
  if (schema.size() == 0) throw ArgumentError("distance over an empty feature set");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += feature_distance(schema.column(i), a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema, std::span<const std::size_t> features) {
  if (features.empty()) throw ArgumentError("distance over an empty feature subset");
  if (a.size() != schema.size() || b.size() != schema.size()) {
    throw ArgumentError("row width does not match schema");
  }
  double sum = 0.0;
  for (auto f : features) sum += feature_distance(schema.column(f), a[f], b[f]);
  return sum / static_cast<double>(features.size());
}

double nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  if (p <= 0.0) return sorted.front();
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

DatasetSummary summarize(const Dataset& dataset) {
  DatasetSummary out;
  out.rows = dataset.rows();
  const auto& schema = dataset.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema.column(c);
    ColumnSummary cs{col.name, col.kind, std::nullopt, {}};
    if (col.numeric()) {
      if (dataset.rows() > 0) {
        std::vector<double> v(dataset.rows());
        double sum = 0.0;
        for (std::size_t r = 0; r < dataset.rows(); ++r) {
          v[r] = dataset.features()(r, c);
          sum += v[r];
        }
        std::sort(v.begin(), v.end());
        cs.numeric = NumericSummary{sum / static_cast<double>(v.size()), v.front(), v.back(),
                                    nearest_rank(v, 0.25), nearest_rank(v, 0.5),
                                    nearest_rank(v, 0.75)};
      }
    } else {
      std::vector<std::size_t> counts(col.values.size(), 0);
      for (std::size_t r = 0; r < dataset.rows(); ++r) {
        ++counts[static_cast<std::size_t>(dataset.features()(r, c))];
      }
      for (std::size_t k = 0; k < counts.size(); ++k) cs.counts.emplace_back(col.values[k], counts[k]);
    }
    out.columns.push_back(std::move(cs));
  }
  if (dataset.rows() > 0) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : dataset.labels()) ++counts[l];
    for (const auto& [k, n] : counts) {
      out.class_distribution.emplace_back(
          k, static_cast<double>(n) / static_cast<double>(dataset.rows()));
    }
  }
  return out;
}

}  // namespace fatkit
