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

#include "prefcf/report.h"

#include <cmath>
#include <filesystem>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "prefcf/csv.h"

namespace prefcf::report {

using nlohmann::json;

absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "structured" || name == "json") return ReportFormat::kStructured;
  return absl::InvalidArgumentError(absl::StrCat("Unknown report format \"", std::string(name), "\""));
}

std::string FormatMetric(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  return absl::StrFormat("%.*f", decimals, value);
}

std::string CsvReport(const experiment::RunRecord& record) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : record.table) {
    out += csv::JoinRow({row.dataset, row.generator, std::string(1, row.preference),
                         FormatMetric(row.proximity, 6), FormatMetric(row.sparsity, 6),
                         FormatMetric(row.validity, 6), FormatMetric(row.data_fidelity, 6),
                         FormatMetric(row.centrality, 6),
                         FormatMetric(row.runtime_seconds, 2)});
    out += "\n";
  }
  return out;
}

namespace {

json NumberOrNull(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

json RowJson(const std::vector<tabular::FeatureSchema>& schema, const tabular::RawRow& row) {
  json out = json::object();
  for (size_t f = 0; f < schema.size() && f < row.size(); ++f) {
    if (const auto* number = std::get_if<double>(&row[f])) {
      out[schema[f].name] = *number;
    } else {
      out[schema[f].name] = std::get<std::string>(row[f]);
    }
  }
  return out;
}

}  // namespace

json StructuredReport(const experiment::RunRecord& record) {
  json root;
  root["format"] = "prefcf-report";
  root["version"] = 1;
  root["dataset"] = record.dataset_name;
  root["config"] = record.config.ToJson();
  root["target"] = {{"name", record.target_name},
                    {"class", record.target_class},
                    {"other", record.other_class}};
  root["dropped_rows"] = record.dropped_rows;
  json weights = json::array();
  for (const auto& [name, weight] : record.jury_weights) {
    weights.push_back({{"model", name}, {"weight", weight}});
  }
  root["jury"] = weights;

  json table = json::array();
  for (const auto& row : record.table) {
    table.push_back({{"dataset", row.dataset},
                     {"generator", row.generator},
                     {"preference", std::string(1, row.preference)},
                     {"proximity", NumberOrNull(row.proximity)},
                     {"sparsity", NumberOrNull(row.sparsity)},
                     {"validity", NumberOrNull(row.validity)},
                     {"data_fidelity", NumberOrNull(row.data_fidelity)},
                     {"centrality", NumberOrNull(row.centrality)},
                     {"runtime_s", row.runtime_seconds},
                     {"queries", row.queries},
                     {"ces", row.ces}});
  }
  root["table"] = table;

  json queries = json::array();
  for (const auto& result : record.results) {
    json block;
    block["generator"] = experiment::GeneratorName(result.generator);
    block["preference"] = std::string(1, engine::PreferenceTag(result.preference));
    block["query_row"] = result.query_row;
    json query = json::object();
    for (size_t i = 0; i < record.query_rows.size(); ++i) {
      if (record.query_rows[i] == result.query_row) {
        query = RowJson(record.schema, record.query_values[i]);
        break;
      }
    }
    query[record.target_name] = record.other_class;
    block["query"] = query;
    json ces = json::array();
    for (size_t i = 0; i < result.ces.size(); ++i) {
      const auto& ce = result.ces[i];
      json entry = i < result.decoded.size() ? RowJson(record.schema, result.decoded[i])
                                             : json::object();
      entry[record.target_name] = ce.validated ? record.target_class : record.other_class;
      ces.push_back({{"values", entry},
                     {"path", ce.path.ToString()},
                     {"prototype_row", ce.prototype_row},
                     {"score", ce.score},
                     {"validated", ce.validated},
                     {"fallback", ce.fallback}});
    }
    block["ces"] = ces;
    block["warnings"] = result.warnings;
    block["seconds"] = result.seconds;
    queries.push_back(block);
  }
  root["queries"] = queries;
  return root;
}

absl::Status EmitReport(const experiment::RunRecord& record, ReportFormat format,
                        const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      return absl::UnavailableError(
          absl::StrCat("Cannot create directory ", parent.string(), ": ", ec.message()));
    }
  }
  switch (format) {
    case ReportFormat::kCsv:
      return csv::WriteFile(path, CsvReport(record));
    case ReportFormat::kStructured:
      return csv::WriteFile(path, StructuredReport(record).dump(2) + "\n");
  }
  return absl::InvalidArgumentError("Unknown report format");
}

}  // namespace prefcf::report
