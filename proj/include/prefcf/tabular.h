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

#ifndef PREFCF_TABULAR_H_
#define PREFCF_TABULAR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace prefcf::tabular {

enum class FeatureKind { kCategorical, kNumeric };
enum class Mutability { kMutable, kImmutable };

// One column of a tabular dataset.
struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  Mutability mutability = Mutability::kMutable;
  // Allowed values of a categorical feature.
  std::vector<std::string> categories;
  // Optional closed range of a numeric feature. When set, values outside the
  // range are rejected at load time.
  std::optional<double> min;
  std::optional<double> max;

  bool categorical() const { return kind == FeatureKind::kCategorical; }
  bool immutable() const { return mutability == Mutability::kImmutable; }
};

// Feature list plus the binary target definition, as read from a schema file.
//
// Schema files are JSON:
//   {
//     "target": {"name": "approved", "class": "yes"},
//     "features": [
//       {"name": "job", "kind": "categorical", "mutability": "mutable",
//        "domain": ["a", "b"]},
//       {"name": "age", "kind": "numeric", "mutability": "immutable",
//        "domain": {"min": 18, "max": 99}}
//     ]
//   }
// The numeric "domain" is optional.
struct Schema {
  std::vector<FeatureSchema> features;
  std::string target_name;
  std::string target_class;
};

absl::Status ValidateSchema(const Schema& schema);
absl::StatusOr<Schema> SchemaFromJson(const nlohmann::json& json);
nlohmann::json SchemaToJson(const Schema& schema);
absl::StatusOr<Schema> LoadSchema(const std::string& path);

using Value = std::variant<double, std::string>;
using RawRow = std::vector<Value>;

// Shortest text form that parses back to the same value.
std::string FormatValue(const Value& value);
bool ValuesEqual(const Value& a, const Value& b);

struct Dataset {
  std::vector<FeatureSchema> schema;
  std::vector<RawRow> rows;
  std::vector<std::string> labels;
  std::string target_name;
  std::string target_class;
  // Rows removed at load time because a cell was empty.
  size_t dropped_count = 0;

  size_t num_features() const { return schema.size(); }
  size_t num_rows() const { return rows.size(); }
  bool IsTarget(size_t row) const { return labels[row] == target_class; }
};

// Checks that every row matches the schema and that the target column holds
// exactly two labels, one of which is the target class.
absl::Status ValidateDataset(const Dataset& data);

// Validates a single row against the schema.
absl::Status ValidateRow(std::span<const FeatureSchema> schema,
                         const RawRow& row);

// Parses a raw cell according to the feature kind. Categorical cells must be
// in the feature domain.
absl::StatusOr<Value> ParseCell(const FeatureSchema& feature,
                                std::string_view cell);

// Parses CSV text. The header must contain exactly the schema feature names
// plus the target column, in any order. Rows with an empty cell are dropped.
absl::StatusOr<Dataset> ParseCsvDataset(std::string_view text,
                                        const Schema& schema);
absl::StatusOr<Dataset> LoadCsv(const std::string& path, const Schema& schema);

// Where an encoded vector came from.
enum class Provenance { kQuery, kPrototype, kCandidate, kCe };

struct EncodedVector {
  std::vector<double> values;
  Provenance provenance = Provenance::kQuery;
};

// Target encoding of categorical features followed by per-feature min-max
// scaling onto [0, 1]. Immutable after Fit.
class Encoder {
 public:
  static absl::StatusOr<Encoder> Fit(const Dataset& data);

  // Out-of-range numeric values clamp to [0, 1]. Categories not seen during
  // fitting are an error.
  absl::StatusOr<std::vector<double>> Encode(const RawRow& row) const;

  // Categorical components map back through the stored reverse map (nearest
  // encoded category, first seen wins on ties); numeric components through the
  // inverse affine map.
  absl::StatusOr<RawRow> Decode(std::span<const double> values) const;

  // Mean target rate of a category before scaling.
  absl::StatusOr<double> CategoryRate(size_t feature,
                                      std::string_view category) const;

  size_t num_features() const { return codecs_.size(); }
  const std::vector<FeatureSchema>& schema() const { return schema_; }

  nlohmann::json ToJson() const;
  static absl::StatusOr<Encoder> FromJson(const nlohmann::json& json);

 private:
  struct Codec {
    // Categories in first-occurrence order with their target rate.
    std::vector<std::pair<std::string, double>> rates;
    double lo = 0.0;
    double hi = 0.0;
  };

  double Scale(const Codec& codec, double raw) const;

  std::vector<FeatureSchema> schema_;
  std::vector<Codec> codecs_;
};

// A dataset in encoded space, the input of every score and model.
struct EncodedData {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // 1 for the target class, 0 otherwise.
  std::vector<bool> immutable;

  size_t num_rows() const { return rows.size(); }
  size_t num_features() const { return immutable.size(); }
  std::vector<size_t> TargetRows() const;
};

absl::StatusOr<EncodedData> EncodeDataset(const Encoder& encoder,
                                          const Dataset& data);

}  // namespace prefcf::tabular

#endif  // PREFCF_TABULAR_H_
