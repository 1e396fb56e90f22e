/*
 * Copyright 2026 The prefcf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "prefcf/tabular.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <system_error>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "prefcf/csv.h"
#include "prefcf/status_macros.h"

namespace prefcf::tabular {

using nlohmann::json;

absl::Status ValidateSchema(const Schema& schema) {
  if (schema.features.empty()) {
    return absl::InvalidArgumentError("Schema has no features");
  }
  if (schema.target_name.empty()) {
    return absl::InvalidArgumentError("Schema has no target name");
  }
  std::set<std::string> names;
  for (const auto& feature : schema.features) {
    if (feature.name.empty()) {
      return absl::InvalidArgumentError("Feature with empty name");
    }
    if (!names.insert(feature.name).second || feature.name == schema.target_name) {
      return absl::InvalidArgumentError(
          absl::StrCat("Duplicate column name \"", feature.name, "\""));
    }
    if (feature.categorical()) {
      if (feature.categories.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Categorical feature \"", feature.name, "\" has an empty domain"));
      }
      std::set<std::string> unique(feature.categories.begin(),
                                   feature.categories.end());
      if (unique.size() != feature.categories.size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Categorical feature \"", feature.name, "\" repeats a category"));
      }
    } else if (feature.min.has_value() != feature.max.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Numeric feature \"", feature.name, "\" needs both min and max"));
    } else if (feature.min.has_value() && *feature.min > *feature.max) {
      return absl::InvalidArgumentError(
          absl::StrCat("Numeric feature \"", feature.name, "\" has min > max"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Schema> SchemaFromJson(const json& root) {
  Schema schema;
  try {
    const auto& target = root.at("target");
    schema.target_name = target.at("name").get<std::string>();
    if (target.contains("class")) {
      schema.target_class = target.at("class").get<std::string>();
    }
    for (const auto& item : root.at("features")) {
      FeatureSchema feature;
      feature.name = item.at("name").get<std::string>();
      const auto kind = item.at("kind").get<std::string>();
      if (kind == "categorical") {
        feature.kind = FeatureKind::kCategorical;
      } else if (kind == "numeric") {
        feature.kind = FeatureKind::kNumeric;
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("Unknown kind \"", kind, "\" for ", feature.name));
      }
      const auto mutability = item.value("mutability", std::string("mutable"));
      if (mutability == "mutable") {
        feature.mutability = Mutability::kMutable;
      } else if (mutability == "immutable") {
        feature.mutability = Mutability::kImmutable;
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "Unknown mutability \"", mutability, "\" for ", feature.name));
      }
      if (item.contains("domain")) {
        const auto& domain = item.at("domain");
        if (feature.categorical()) {
          for (const auto& category : domain) {
            feature.categories.push_back(category.is_string()
                                             ? category.get<std::string>()
                                             : category.dump());
          }
        } else {
          feature.min = domain.at("min").get<double>();
          feature.max = domain.at("max").get<double>();
        }
      }
      schema.features.push_back(std::move(feature));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Malformed schema: ", e.what()));
  }
  RETURN_IF_ERROR(ValidateSchema(schema));
  return schema;
}

json SchemaToJson(const Schema& schema) {
  json features = json::array();
  for (const auto& feature : schema.features) {
    json item;
    item["name"] = feature.name;
    item["kind"] = feature.categorical() ? "categorical" : "numeric";
    item["mutability"] = feature.immutable() ? "immutable" : "mutable";
    if (feature.categorical()) {
      item["domain"] = feature.categories;
    } else if (feature.min.has_value()) {
      item["domain"] = {{"min", *feature.min}, {"max", *feature.max}};
    }
    features.push_back(std::move(item));
  }
  return {{"target", {{"name", schema.target_name}, {"class", schema.target_class}}},
          {"features", std::move(features)}};
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile(path));
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Schema file ", path, " is not valid JSON: ", e.what()));
  }
  return SchemaFromJson(root);
}

std::string FormatValue(const Value& value) {
  if (const auto* text = std::get_if<std::string>(&value)) return *text;
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), std::get<double>(value));
  return std::string(buffer, result.ptr);
}

bool ValuesEqual(const Value& a, const Value& b) { return a == b; }

absl::StatusOr<Value> ParseCell(const FeatureSchema& feature,
                                std::string_view cell) {
  const absl::string_view stripped =
      absl::StripAsciiWhitespace(absl::string_view(cell.data(), cell.size()));
  const std::string_view trimmed(stripped.data(), stripped.size());
  if (feature.categorical()) {
    const std::string value(trimmed);
    if (std::find(feature.categories.begin(), feature.categories.end(),
                  value) == feature.categories.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("Schema violation: feature \"", feature.name,
                       "\" has value \"", value, "\" outside its domain"));
    }
    return Value(value);
  }
  double parsed = 0.0;
  const auto result =
      std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), parsed);
  if (result.ec != std::errc() || result.ptr != trimmed.data() + trimmed.size() ||
      !std::isfinite(parsed)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Schema violation: feature \"", feature.name,
                     "\" has non-numeric value \"", std::string(trimmed), "\""));
  }
  if (feature.min.has_value() && (parsed < *feature.min || parsed > *feature.max)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Schema violation: feature \"", feature.name, "\" has value ",
        FormatValue(parsed), " outside [", FormatValue(*feature.min), ", ",
        FormatValue(*feature.max), "]"));
  }
  return Value(parsed);
}

absl::Status ValidateRow(std::span<const FeatureSchema> schema,
                         const RawRow& row) {
  if (row.size() != schema.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Row has ", row.size(), " values, schema has ", schema.size()));
  }
  for (size_t i = 0; i < schema.size(); ++i) {
    const auto& feature = schema[i];
    if (feature.categorical()) {
      const auto* text = std::get_if<std::string>(&row[i]);
      if (text == nullptr ||
          std::find(feature.categories.begin(), feature.categories.end(),
                    *text) == feature.categories.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("Schema violation: feature \"", feature.name,
                         "\" has value \"", FormatValue(row[i]),
                         "\" outside its domain"));
      }
    } else {
      const auto* number = std::get_if<double>(&row[i]);
      if (number == nullptr || !std::isfinite(*number)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Schema violation: feature \"", feature.name, "\" is not numeric"));
      }
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateDataset(const Dataset& data) {
  if (data.labels.size() != data.rows.size()) {
    return absl::InvalidArgumentError("Label count differs from row count");
  }
  for (const auto& row : data.rows) {
    RETURN_IF_ERROR(ValidateRow(data.schema, row));
  }
  const std::set<std::string> distinct(data.labels.begin(), data.labels.end());
  if (distinct.size() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Target column \"", data.target_name, "\" must hold exactly two labels, found ",
        distinct.size()));
  }
  if (!distinct.contains(data.target_class)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Target class \"", data.target_class,
                     "\" does not occur in column \"", data.target_name, "\""));
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> ParseCsvDataset(std::string_view text,
                                        const Schema& schema) {
  RETURN_IF_ERROR(ValidateSchema(schema));
  ASSIGN_OR_RETURN(const std::vector<csv::Record> records, csv::Parse(text));
  if (records.empty()) return absl::InvalidArgumentError("CSV has no header");

  const auto& header = records.front().fields;
  std::map<std::string, size_t> column_of;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string name(absl::StripAsciiWhitespace(header[c]));
    if (!column_of.emplace(name, c).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("Header repeats column \"", name, "\""));
    }
  }
  std::vector<size_t> feature_columns;
  for (const auto& feature : schema.features) {
    const auto it = column_of.find(feature.name);
    if (it == column_of.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("Header lacks feature column \"", feature.name, "\""));
    }
    feature_columns.push_back(it->second);
  }
  const auto target_it = column_of.find(schema.target_name);
  if (target_it == column_of.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Header lacks target column \"", schema.target_name, "\""));
  }
  if (header.size() != schema.features.size() + 1) {
    return absl::InvalidArgumentError(
        "Header has columns that are not in the schema");
  }
  const size_t target_column = target_it->second;

  Dataset data;
  data.schema = schema.features;
  data.target_name = schema.target_name;
  data.target_class = schema.target_class;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.fields.size() != header.size()) {
      return absl::DataLossError(absl::StrCat(
          "CSV parse error at line ", record.line, ": expected ", header.size(),
          " fields, found ", record.fields.size()));
    }
    const bool has_null = std::any_of(
        record.fields.begin(), record.fields.end(), [](const std::string& cell) {
          return absl::StripAsciiWhitespace(cell).empty();
        });
    if (has_null) {
      ++data.dropped_count;
      continue;
    }
    RawRow row;
    row.reserve(schema.features.size());
    for (size_t f = 0; f < schema.features.size(); ++f) {
      auto value = ParseCell(schema.features[f], record.fields[feature_columns[f]]);
      if (!value.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Line ", record.line, ": ", value.status().message()));
      }
      row.push_back(*std::move(value));
    }
    data.rows.push_back(std::move(row));
    data.labels.emplace_back(
        absl::StripAsciiWhitespace(record.fields[target_column]));
  }
  if (data.rows.empty()) {
    return absl::InvalidArgumentError("CSV has no complete rows");
  }
  RETURN_IF_ERROR(ValidateDataset(data));
  return data;
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path, const Schema& schema) {
  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile(path));
  return ParseCsvDataset(text, schema);
}

// Encoder.

double Encoder::Scale(const Codec& codec, double raw) const {
  if (codec.hi == codec.lo) return 0.5;
  return std::clamp((raw - codec.lo) / (codec.hi - codec.lo), 0.0, 1.0);
}

absl::StatusOr<Encoder> Encoder::Fit(const Dataset& data) {
  if (data.rows.empty()) {
    return absl::InvalidArgumentError("Cannot fit an encoder on an empty dataset");
  }
  RETURN_IF_ERROR(ValidateDataset(data));
  Encoder encoder;
  encoder.schema_ = data.schema;
  for (size_t f = 0; f < data.num_features(); ++f) {
    Codec codec;
    if (data.schema[f].categorical()) {
      std::vector<std::string> order;
      std::map<std::string, std::pair<size_t, size_t>> counts;
      for (size_t r = 0; r < data.num_rows(); ++r) {
        const auto& category = std::get<std::string>(data.rows[r][f]);
        auto [it, inserted] = counts.try_emplace(category, 0, 0);
        if (inserted) order.push_back(category);
        it->second.first += data.IsTarget(r) ? 1 : 0;
        it->second.second += 1;
      }
      for (const auto& category : order) {
        const auto [hits, total] = counts[category];
        codec.rates.emplace_back(category, static_cast<double>(hits) /
                                               static_cast<double>(total));
      }
      codec.lo = std::numeric_limits<double>::infinity();
      codec.hi = -codec.lo;
      for (const auto& [category, rate] : codec.rates) {
        codec.lo = std::min(codec.lo, rate);
        codec.hi = std::max(codec.hi, rate);
      }
    } else {
      codec.lo = std::numeric_limits<double>::infinity();
      codec.hi = -codec.lo;
      for (const auto& row : data.rows) {
        const double value = std::get<double>(row[f]);
        codec.lo = std::min(codec.lo, value);
        codec.hi = std::max(codec.hi, value);
      }
    }
    encoder.codecs_.push_back(std::move(codec));
  }
  return encoder;
}

absl::StatusOr<std::vector<double>> Encoder::Encode(const RawRow& row) const {
  if (row.size() != codecs_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Row has ", row.size(), " values, encoder expects ", codecs_.size()));
  }
  std::vector<double> out(row.size());
  for (size_t f = 0; f < row.size(); ++f) {
    const Codec& codec = codecs_[f];
    if (schema_[f].categorical()) {
      const auto* category = std::get_if<std::string>(&row[f]);
      if (category == nullptr) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Feature \"", schema_[f].name, "\" expects a categorical value"));
      }
      const auto it = std::find_if(
          codec.rates.begin(), codec.rates.end(),
          [&](const auto& entry) { return entry.first == *category; });
      if (it == codec.rates.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("Feature \"", schema_[f].name, "\": category \"",
                         *category, "\" was not seen when fitting the encoder"));
      }
      out[f] = Scale(codec, it->second);
    } else {
      const auto* number = std::get_if<double>(&row[f]);
      if (number == nullptr) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Feature \"", schema_[f].name, "\" expects a numeric value"));
      }
      out[f] = Scale(codec, *number);
    }
  }
  return out;
}

absl::StatusOr<RawRow> Encoder::Decode(std::span<const double> values) const {
  if (values.size() != codecs_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Vector has ", values.size(), " values, encoder expects ", codecs_.size()));
  }
  RawRow row;
  row.reserve(values.size());
  for (size_t f = 0; f < values.size(); ++f) {
    const Codec& codec = codecs_[f];
    if (schema_[f].categorical()) {
      size_t best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < codec.rates.size(); ++c) {
        const double gap = std::abs(Scale(codec, codec.rates[c].second) - values[f]);
        if (gap < best_gap) {
          best_gap = gap;
          best = c;
        }
      }
      row.emplace_back(codec.rates[best].first);
    } else if (codec.hi == codec.lo) {
      row.emplace_back(codec.lo);
    } else {
      row.emplace_back(codec.lo + values[f] * (codec.hi - codec.lo));
    }
  }
  return row;
}

absl::StatusOr<double> Encoder::CategoryRate(size_t feature,
                                             std::string_view category) const {
  if (feature >= codecs_.size() || !schema_[feature].categorical()) {
    return absl::InvalidArgumentError("Not a categorical feature");
  }
  for (const auto& [name, rate] : codecs_[feature].rates) {
    if (name == category) return rate;
  }
  return absl::NotFoundError(absl::StrCat("Unknown category ", std::string(category)));
}

json Encoder::ToJson() const {
  json features = json::array();
  for (size_t f = 0; f < codecs_.size(); ++f) {
    json item;
    item["name"] = schema_[f].name;
    item["lo"] = codecs_[f].lo;
    item["hi"] = codecs_[f].hi;
    if (schema_[f].categorical()) {
      json rates = json::array();
      for (const auto& [category, rate] : codecs_[f].rates) {
        rates.push_back({{"category", category},
                         {"rate", rate},
                         {"encoded", Scale(codecs_[f], rate)}});
      }
      item["rates"] = std::move(rates);
    }
    features.push_back(std::move(item));
  }
  Schema schema{schema_, "", ""};
  return {{"format", "prefcf-encoder"},
          {"version", 1},
          {"schema", SchemaToJson(schema)["features"]},
          {"features", std::move(features)}};
}

absl::StatusOr<Encoder> Encoder::FromJson(const json& root) {
  Encoder encoder;
  try {
    if (root.at("format").get<std::string>() != "prefcf-encoder" ||
        root.at("version").get<int>() != 1) {
      return absl::InvalidArgumentError("Unsupported encoder file version");
    }
    ASSIGN_OR_RETURN(
        Schema schema,
        SchemaFromJson({{"target", {{"name", "__target__"}}},
                        {"features", root.at("schema")}}));
    encoder.schema_ = std::move(schema.features);
    for (const auto& item : root.at("features")) {
      Codec codec;
      codec.lo = item.at("lo").get<double>();
      codec.hi = item.at("hi").get<double>();
      if (item.contains("rates")) {
        for (const auto& rate : item.at("rates")) {
          codec.rates.emplace_back(rate.at("category").get<std::string>(),
                                   rate.at("rate").get<double>());
        }
      }
      encoder.codecs_.push_back(std::move(codec));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Malformed encoder file: ", e.what()));
  }
  if (encoder.codecs_.size() != encoder.schema_.size()) {
    return absl::InvalidArgumentError("Encoder file feature count mismatch");
  }
  return encoder;
}

std::vector<size_t> EncodedData::TargetRows() const {
  std::vector<size_t> out;
  for (size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == 1) out.push_back(r);
  }
  return out;
}

absl::StatusOr<EncodedData> EncodeDataset(const Encoder& encoder,
                                          const Dataset& data) {
  EncodedData encoded;
  encoded.rows.reserve(data.num_rows());
  for (const auto& row : data.rows) {
    ASSIGN_OR_RETURN(auto vector, encoder.Encode(row));
    encoded.rows.push_back(std::move(vector));
  }
  for (size_t r = 0; r < data.num_rows(); ++r) {
    encoded.labels.push_back(data.IsTarget(r) ? 1 : 0);
  }
  for (const auto& feature : data.schema) {
    encoded.immutable.push_back(feature.immutable());
  }
  return encoded;
}

}  // namespace prefcf::tabular
