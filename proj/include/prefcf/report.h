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

#ifndef PREFCF_REPORT_H_
#define PREFCF_REPORT_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "prefcf/experiment.h"

namespace prefcf::report {

inline constexpr std::string_view kCsvHeader =
    "dataset,generator,preference,proximity,sparsity,validity,data_fidelity,"
    "centrality,runtime_s";

enum class ReportFormat { kCsv, kStructured };

absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view name);

// Fixed-precision number; NaN prints as "nan".
std::string FormatMetric(double value, int decimals);

// One header line plus one line per table row, newline terminated.
std::string CsvReport(const experiment::RunRecord& record);

// Config, jury weights, the metric table and per-query decoded CEs.
nlohmann::json StructuredReport(const experiment::RunRecord& record);

absl::Status EmitReport(const experiment::RunRecord& record, ReportFormat format,
                        const std::string& path);

}  // namespace prefcf::report

#endif  // PREFCF_REPORT_H_
