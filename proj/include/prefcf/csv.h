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

#ifndef PREFCF_CSV_H_
#define PREFCF_CSV_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace prefcf::csv {

struct Record {
  size_t line = 0;  // 1-based line number of the record start.
  std::vector<std::string> fields;
};

// Parses comma-separated text with RFC 4180 quoting. Blank lines are skipped.
// Unterminated quotes and stray characters after a closing quote are reported
// as DataLoss errors carrying the line number.
absl::StatusOr<std::vector<Record>> Parse(std::string_view text);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view content);

// Quotes the field if it contains a comma, quote or newline.
std::string EscapeField(std::string_view field);
std::string JoinRow(const std::vector<std::string>& fields);

}  // namespace prefcf::csv

#endif  // PREFCF_CSV_H_
