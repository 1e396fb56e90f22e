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

#ifndef PREFCF_EXPERIMENT_H_
#define PREFCF_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "prefcf/engine.h"
#include "prefcf/metrics.h"
#include "prefcf/models.h"
#include "prefcf/tabular.h"

namespace prefcf::experiment {

enum class GeneratorKind { kTcol, kNearestTarget, kRandomPath };

std::string_view GeneratorName(GeneratorKind kind);
absl::StatusOr<GeneratorKind> ParseGenerator(std::string_view name);

// Benchmark configuration. Config files are JSON objects with exactly these
// top-level keys (all but `dataset`, `schema` and `out` are optional):
//   dataset, schema, target, target_class, preferences, generators, queries,
//   seed, depth, num_ces, budget, jury, folds, out
// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
  std::string dataset;
  std::string schema;
  // Override the schema file's target definition when non-empty.
  std::string target;
  std::string target_class;
  std::vector<engine::Preference> preferences = engine::AllPreferences();
  std::vector<GeneratorKind> generators = {GeneratorKind::kTcol};
  int queries = 10;
  uint64_t seed = 0;
  int depth = 3;
  int num_ces = 5;
  int budget = 64;
  std::vector<models::ModelKind> jury = {models::ModelKind::kKnn,
                                         models::ModelKind::kNaiveBayes,
                                         models::ModelKind::kDecisionTree};
  int folds = 10;
  std::string out;

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<ExperimentConfig> FromJson(const nlohmann::json& json,
                                                   const std::string& base_dir = "");
};

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Loaded data with everything the generators and metrics need.
struct Workspace {
  tabular::Dataset data;
  tabular::Encoder encoder;
  tabular::EncodedData encoded;
  std::unique_ptr<models::ClassifierModel> validation_model;
  models::ThirdPartyJury jury;
};

// Loads and encodes the dataset, fits the random-forest validation model and
// the cross-validated jury.
absl::StatusOr<Workspace> PrepareWorkspace(const tabular::Dataset& data,
                                           std::span<const models::ModelKind> jury,
                                           int folds, uint64_t seed);

// The `m` target-class rows nearest the query, verbatim.
absl::StatusOr<std::vector<engine::CandidateCE>> BaselineNearestTarget(
    const tabular::EncodedData& data, std::span<const double> query, int m,
    const models::ClassifierModel& model,
    scoring::Distance distance = scoring::Distance::kEuclidean);

// Uniformly random spliced paths between the query and its nearest
// prototype, immutable features pinned to the query. Keeps the first `m`
// distinct paths that validate within `max_attempts` draws; an empty result
// carries a warning.
absl::StatusOr<engine::Generation> BaselineRandomPath(
    const tabular::EncodedData& data, std::span<const double> query, int m,
    uint64_t seed, const models::ClassifierModel& model, int max_attempts = 200);

// Maps an encoded CE back to raw values by copying each feature from the
// prototype or the query row as its path bit says.
absl::StatusOr<tabular::RawRow> DecodeByPath(const tabular::RawRow& prototype,
                                             const tabular::RawRow& query,
                                             const engine::PathMask& path);

struct QueryResult {
  size_t query_row = 0;
  GeneratorKind generator = GeneratorKind::kTcol;
  engine::Preference preference = engine::Preference::kA;
  std::vector<engine::CandidateCE> ces;
  std::vector<tabular::RawRow> decoded;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string dataset_name;
  std::vector<tabular::FeatureSchema> schema;
  std::string target_name;
  std::string target_class;
  std::string other_class;
  size_t dropped_rows = 0;
  std::vector<std::pair<std::string, double>> jury_weights;
  std::vector<size_t> query_rows;
  std::vector<tabular::RawRow> query_values;
  std::vector<QueryResult> results;
  std::vector<metrics::MetricsReport> table;
};

// Full benchmark: for every (generator, preference, query) generates CEs,
// times generation and aggregates the metric table. Errors carry the stage
// that failed ("[load]", "[prepare]", "[generate]", ...).
absl::StatusOr<RunRecord> RunExperiment(const ExperimentConfig& config);

// Same as RunExperiment on an in-memory dataset.
absl::StatusOr<RunRecord> RunExperimentOnData(const ExperimentConfig& config,
                                              const tabular::Dataset& data,
                                              std::string dataset_name);

}  // namespace prefcf::experiment

#endif  // PREFCF_EXPERIMENT_H_
