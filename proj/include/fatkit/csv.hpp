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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatkit/tabular.hpp"

namespace fatkit {

// Splits RFC 4180 style text into records. Double quotes escape commas,
// newlines and (doubled) quotes. Trailing blank lines are dropped.
struct CsvField {
  std::string text;
  bool quoted = false;
};
std::vector<std::vector<CsvField>> parse_csv_records(std::string_view text);

// Builds a Dataset from CSV text whose first line is the header. Without a
// schema one is inferred: a column is numeric iff every cell parses as a
// number, otherwise categorical with values in order of first appearance.
Dataset parse_csv(std::string_view text, const std::optional<FeatureSchema>& schema,
                  const std::string& target);

Dataset load_csv(const std::filesystem::path& path, const std::optional<FeatureSchema>& schema,
                 const std::string& target);

// Features in schema order followed by the target column.
std::string to_csv(const Dataset& dataset);

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);
FeatureSchema load_schema(const std::filesystem::path& path);

}  // namespace fatkit
