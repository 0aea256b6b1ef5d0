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

#include "fatkit/csv.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fatkit/errors.hpp"

namespace fatkit {

std::vector<std::vector<CsvField>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<CsvField>> records;
  std::vector<CsvField> record;
  CsvField field;
  bool in_quotes = false;
  bool record_open = false;  // any byte of the current record seen
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = CsvField{};
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.text.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.text.empty() || field.quoted) {
          throw IngestionError(records.empty() ? 0 : records.size() - 1, record.size(),
                               "unexpected quote on line " + std::to_string(line));
        }
        field.quoted = true;
        in_quotes = true;
        record_open = true;
        break;
      case ',':
        end_field();
        record_open = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.text.push_back(ch);
        record_open = true;
    }
  }
  if (in_quotes) {
    throw IngestionError(records.empty() ? 0 : records.size() - 1, record.size(),
                         "unterminated quoted field");
  }
  if (record_open) end_record();

  // Blank trailing lines show up as single empty unquoted fields.
  while (!records.empty() && records.back().size() == 1 && records.back()[0].text.empty() &&
         !records.back()[0].quoted) {
    records.pop_back();
  }
  return records;
}

namespace {

std::vector<Column> infer_columns(const std::vector<std::vector<CsvField>>& records,
                                  const std::vector<std::size_t>& feature_pos,
                                  const std::vector<std::string>& header) {
  std::vector<Column> cols;
  for (auto pos : feature_pos) {
    Column c;
    c.name = header[pos];
    bool numeric = records.size() > 1;
    for (std::size_t r = 1; r < records.size() && numeric; ++r) {
      numeric = parse_number(records[r][pos].text).has_value();
    }
    if (numeric) {
      c.kind = FeatureKind::numeric;
      c.min = *parse_number(records[1][pos].text);
      c.max = c.min;
      for (std::size_t r = 2; r < records.size(); ++r) {
        const double v = *parse_number(records[r][pos].text);
        c.min = std::min(c.min, v);
        c.max = std::max(c.max, v);
      }
    } else {
      c.kind = FeatureKind::categorical;
      std::unordered_map<std::string, std::size_t> seen;
      for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& t = records[r][pos].text;
        if (seen.emplace(t, c.values.size()).second) c.values.push_back(t);
      }
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

}  // namespace

Dataset parse_csv(std::string_view text, const std::optional<FeatureSchema>& schema,
                  const std::string& target) {
  const auto records = parse_csv_records(text);
  if (records.empty()) throw IngestionError(0, 0, "missing header line");

  std::vector<std::string> header;
  for (const auto& f : records[0]) header.push_back(f.text);
  std::size_t target_pos = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == target) target_pos = i;
  }
  if (target_pos == header.size()) throw SchemaError("target column '" + target + "' not found");

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw IngestionError(r - 1, std::min(records[r].size(), header.size()),
                           "row " + std::to_string(r - 1) + " has " +
                               std::to_string(records[r].size()) + " cells, header has " +
                               std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (records[r][c].text.empty()) {
        throw IngestionError(r - 1, c,
                             "missing cell at row " + std::to_string(r - 1) + ", column '" +
                                 header[c] + "'");
      }
    }
  }

  // Source position of each schema column.
  std::vector<std::size_t> feature_pos;
  FeatureSchema resolved;
  if (schema) {
    if (schema->target() != target) {
      throw SchemaError("schema target '" + schema->target() + "' differs from '" + target + "'");
    }
    if (header.size() != schema->size() + 1) {
      throw SchemaError("header has " + std::to_string(header.size()) +
                        " columns, schema expects " + std::to_string(schema->size() + 1));
    }
    for (const auto& col : schema->columns()) {
      std::size_t pos = header.size();
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == col.name) pos = i;
      }
      if (pos == header.size()) throw SchemaError("header lacks schema column '" + col.name + "'");
      feature_pos.push_back(pos);
    }
    resolved = *schema;
  } else {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i != target_pos) feature_pos.push_back(i);
    }
    resolved = FeatureSchema(infer_columns(records, feature_pos, header), target);
  }

  RowMatrix features(resolved.size());
  features.reserve(records.size() - 1);
  std::vector<std::string> labels;
  labels.reserve(records.size() - 1);
  std::vector<double> row(resolved.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    for (std::size_t c = 0; c < resolved.size(); ++c) {
      const auto& col = resolved.column(c);
      const auto& token = records[r][feature_pos[c]].text;
      if (col.numeric()) {
        auto v = parse_number(token);
        if (!v) {
          throw IngestionError(r - 1, feature_pos[c],
                               "'" + token + "' is not a number (column '" + col.name + "')");
        }
        row[c] = *v;
      } else {
        auto code = col.code_of(token);
        if (!code) {
          throw IngestionError(r - 1, feature_pos[c],
                               "'" + token + "' is not in the value-set of '" + col.name + "'");
        }
        row[c] = static_cast<double>(*code);
      }
    }
    features.push_back(row);
    labels.push_back(records[r][target_pos].text);
  }
  return Dataset(std::move(resolved), std::move(features), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<FeatureSchema>& schema,
                 const std::string& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, target);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_csv(const Dataset& dataset) {
  const auto& schema = dataset.schema();
  std::string out;
  for (const auto& c : schema.columns()) {
    out += quote_if_needed(c.name);
    out.push_back(',');
  }
  out += quote_if_needed(schema.target());
  out.push_back('\n');
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    const auto row = dataset.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += quote_if_needed(cell_text(schema.column(c), row[c]));
      out.push_back(',');
    }
    out += quote_if_needed(dataset.label(r));
    out.push_back('\n');
  }
  return out;
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns()) {
    nlohmann::json jc{{"name", c.name}, {"kind", to_string(c.kind)}};
    if (c.numeric()) {
      jc["range"] = {c.min, c.max};
    } else {
      jc["values"] = c.values;
    }
    cols.push_back(std::move(jc));
  }
  return {{"columns", std::move(cols)},
          {"target", schema.target()},
          {"protected", schema.protected_features()}};
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<Column> cols;
    for (const auto& jc : j.at("columns")) {
      Column c;
      c.name = jc.at("name").get<std::string>();
      const auto kind = jc.at("kind").get<std::string>();
      if (kind == "numeric") {
        c.kind = FeatureKind::numeric;
        const auto& range = jc.at("range");
        if (!range.is_array() || range.size() != 2) {
          throw SchemaError("range of '" + c.name + "' must be [min, max]");
        }
        c.min = range[0].get<double>();
        c.max = range[1].get<double>();
      } else if (kind == "categorical") {
        c.kind = FeatureKind::categorical;
        c.values = jc.at("values").get<std::vector<std::string>>();
        if (c.values.empty()) throw SchemaError("value-set of '" + c.name + "' is empty");
      } else {
        throw SchemaError("unknown column kind '" + kind + "'");
      }
      cols.push_back(std::move(c));
    }
    std::vector<std::string> prot;
    if (j.contains("protected")) prot = j.at("protected").get<std::vector<std::string>>();
    return FeatureSchema(std::move(cols), j.at("target").get<std::string>(), std::move(prot));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema JSON: ") + e.what());
  }
}

FeatureSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  try {
    return schema_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
}

}  // namespace fatkit
