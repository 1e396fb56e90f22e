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

#include "prefcf/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "absl/strings/str_cat.h"
#include "prefcf/csv.h"
#include "prefcf/status_macros.h"

namespace prefcf::experiment {
namespace {

using nlohmann::json;

constexpr const char* kConfigKeys[] = {
    "dataset", "schema", "target",  "target_class", "preferences", "generators", "queries",
    "seed",    "depth",  "num_ces", "budget",       "jury",        "folds",      "out"};

absl::Status Staged(std::string_view stage, const absl::Status& status) {
  return absl::Status(status.code(), absl::StrCat("[", std::string(stage), "] ", status.message()));
}

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
    return path;
  }
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

double MeanOf(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

std::string_view GeneratorName(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kTcol:
      return "tcol";
    case GeneratorKind::kNearestTarget:
      return "nearest_target";
    case GeneratorKind::kRandomPath:
      return "random_path";
  }
  return "unknown";
}

absl::StatusOr<GeneratorKind> ParseGenerator(std::string_view name) {
  for (const GeneratorKind kind :
       {GeneratorKind::kTcol, GeneratorKind::kNearestTarget, GeneratorKind::kRandomPath}) {
    if (GeneratorName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(absl::StrCat("Unknown generator \"", std::string(name), "\""));
}

absl::Status ExperimentConfig::Validate() const {
  if (dataset.empty()) return absl::InvalidArgumentError("Config needs a dataset path");
  if (schema.empty()) return absl::InvalidArgumentError("Config needs a schema path");
  if (queries < 1) return absl::InvalidArgumentError("queries must be positive");
  if (num_ces < 1) return absl::InvalidArgumentError("num_ces must be positive");
  if (budget < 1) return absl::InvalidArgumentError("budget must be positive");
  if (depth < 3 || depth > 9) {
    return absl::InvalidArgumentError(absl::StrCat("depth must lie in [3, 9], got ", depth));
  }
  if (folds < 2) return absl::InvalidArgumentError("folds must be at least 2");
  if (jury.size() < 2) return absl::InvalidArgumentError("jury needs at least two models");
  return absl::OkStatus();
}

json ExperimentConfig::ToJson() const {
  json prefs = json::array();
  for (const auto p : preferences) prefs.push_back(std::string(1, engine::PreferenceTag(p)));
  json gens = json::array();
  for (const auto g : generators) gens.push_back(GeneratorName(g));
  json members = json::array();
  for (const auto k : jury) members.push_back(models::ModelKindName(k));
  return {{"dataset", dataset},   {"schema", schema}, {"target", target},
          {"target_class", target_class},
          {"preferences", prefs}, {"generators", gens}, {"queries", queries},
          {"seed", seed},         {"depth", depth},     {"num_ces", num_ces},
          {"budget", budget},     {"jury", members},    {"folds", folds},
          {"out", out}};
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::FromJson(const json& root,
                                                            const std::string& base_dir) {
  if (!root.is_object()) return absl::InvalidArgumentError("Config must be a JSON object");
  const std::set<std::string> known(std::begin(kConfigKeys), std::end(kConfigKeys));
  for (const auto& [key, value] : root.items()) {
    if (!known.contains(key)) {
      return absl::InvalidArgumentError(absl::StrCat("Unknown config key \"", key, "\""));
    }
  }
  ExperimentConfig config;
  try {
    config.dataset = Resolve(base_dir, root.value("dataset", std::string()));
    config.schema = Resolve(base_dir, root.value("schema", std::string()));
    config.out = Resolve(base_dir, root.value("out", std::string()));
    config.target = root.value("target", std::string());
    config.target_class = root.value("target_class", std::string());
    if (root.contains("preferences")) {
      config.preferences.clear();
      for (const auto& tag : root.at("preferences")) {
        ASSIGN_OR_RETURN(const auto p, engine::ParsePreference(tag.get<std::string>()));
        config.preferences.push_back(p);
      }
    }
    if (root.contains("generators")) {
      config.generators.clear();
      for (const auto& name : root.at("generators")) {
        ASSIGN_OR_RETURN(const auto g, ParseGenerator(name.get<std::string>()));
        config.generators.push_back(g);
      }
    }
    if (root.contains("jury")) {
      config.jury.clear();
      for (const auto& name : root.at("jury")) {
        ASSIGN_OR_RETURN(const auto k, models::ParseModelKind(name.get<std::string>()));
        config.jury.push_back(k);
      }
    }
    config.queries = root.value("queries", config.queries);
    config.seed = root.value("seed", config.seed);
    config.depth = root.value("depth", config.depth);
    config.num_ces = root.value("num_ces", config.num_ces);
    config.budget = root.value("budget", config.budget);
    config.folds = root.value("folds", config.folds);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("Malformed config: ", e.what()));
  }
  if (config.out.empty()) return absl::InvalidArgumentError("Config needs an out path");
  RETURN_IF_ERROR(config.Validate());
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile(path));
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("Config ", path, " is not valid JSON: ", e.what()));
  }
  return ExperimentConfig::FromJson(
      root, std::filesystem::path(path).parent_path().string());
}

absl::StatusOr<Workspace> PrepareWorkspace(const tabular::Dataset& data,
                                           std::span<const models::ModelKind> jury,
                                           int folds, uint64_t seed) {
  Workspace ws;
  ws.data = data;
  ASSIGN_OR_RETURN(ws.encoder, tabular::Encoder::Fit(ws.data));
  ASSIGN_OR_RETURN(ws.encoded, tabular::EncodeDataset(ws.encoder, ws.data));
  ASSIGN_OR_RETURN(ws.validation_model,
                   models::FitBuiltin(models::ModelKind::kRandomForest, ws.encoded, seed));
  ASSIGN_OR_RETURN(ws.jury, models::CvWeights(jury, ws.encoded, folds, seed));
  return ws;
}

absl::StatusOr<std::vector<engine::CandidateCE>> BaselineNearestTarget(
    const tabular::EncodedData& data, std::span<const double> query, int m,
    const models::ClassifierModel& model, scoring::Distance distance) {
  if (m < 1) return absl::InvalidArgumentError("m must be positive");
  const std::vector<size_t> targets = data.TargetRows();
  if (targets.size() < static_cast<size_t>(m)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Need ", m, " target-class rows, found ", targets.size()));
  }
  std::vector<std::pair<double, size_t>> ranked;
  for (const size_t r : targets) {
    ASSIGN_OR_RETURN(const double d, scoring::ComputeDistance(data.rows[r], query, distance));
    ranked.emplace_back(d, r);
  }
  std::partial_sort(ranked.begin(), ranked.begin() + m, ranked.end());
  std::vector<engine::CandidateCE> out;
  for (int i = 0; i < m; ++i) {
    engine::CandidateCE ce;
    ce.prototype_row = ranked[i].second;
    ce.vector = {data.rows[ce.prototype_row], tabular::Provenance::kCe};
    ce.path.bits.assign(data.num_features(), 0);
    ce.score = -ranked[i].first;
    ce.validated = model.Predict(ce.vector.values) == 1;
    ce.candidate_rank = i;
    out.push_back(std::move(ce));
  }
  return out;
}

absl::StatusOr<engine::Generation> BaselineRandomPath(
    const tabular::EncodedData& data, std::span<const double> query, int m,
    uint64_t seed, const models::ClassifierModel& model, int max_attempts) {
  if (m < 1) return absl::InvalidArgumentError("m must be positive");
  ASSIGN_OR_RETURN(const auto nearest,
                   engine::SelectPrototypes(data, query, engine::Preference::kB, model, 1));
  const size_t prototype_row = nearest.front();
  const auto& prototype = data.rows[prototype_row];
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  engine::Generation generation;
  for (int attempt = 0; attempt < max_attempts &&
                        generation.ces.size() < static_cast<size_t>(m);
       ++attempt) {
    engine::PathMask path;
    path.bits.resize(data.num_features());
    for (size_t f = 0; f < path.size(); ++f) {
      path.bits[f] = data.immutable[f] ? 1 : (coin(rng) ? 1 : 0);
    }
    ASSIGN_OR_RETURN(auto vector, engine::FillCe(prototype, query, path));
    if (model.Predict(vector) != 1) continue;
    const bool duplicate = std::any_of(
        generation.ces.begin(), generation.ces.end(),
        [&](const engine::CandidateCE& ce) { return ce.vector.values == vector; });
    if (duplicate) continue;
    engine::CandidateCE ce;
    ce.prototype_row = prototype_row;
    ce.vector = {std::move(vector), tabular::Provenance::kCe};
    ce.path = std::move(path);
    ce.validated = true;
    ce.candidate_rank = attempt;
    generation.ces.push_back(std::move(ce));
  }
  if (generation.ces.empty()) {
    generation.warnings.push_back(absl::StrCat(
        "random_path found no valid CE in ", max_attempts, " attempts"));
  }
  return generation;
}

absl::StatusOr<tabular::RawRow> DecodeByPath(const tabular::RawRow& prototype,
                                             const tabular::RawRow& query,
                                             const engine::PathMask& path) {
  if (prototype.size() != query.size() || path.size() != query.size()) {
    return absl::InvalidArgumentError("Cannot decode: length mismatch");
  }
  tabular::RawRow out;
  out.reserve(query.size());
  for (size_t f = 0; f < query.size(); ++f) {
    out.push_back(path.bits[f] == 0 ? prototype[f] : query[f]);
  }
  return out;
}

absl::StatusOr<RunRecord> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status status = config.Validate(); !status.ok()) {
    return Staged("config", status);
  }
  auto schema = tabular::LoadSchema(config.schema);
  if (!schema.ok()) return Staged("load", schema.status());
  if (!config.target.empty()) schema->target_name = config.target;
  if (!config.target_class.empty()) schema->target_class = config.target_class;
  auto data = tabular::LoadCsv(config.dataset, *schema);
  if (!data.ok()) return Staged("load", data.status());
  return RunExperimentOnData(config, *data,
                             std::filesystem::path(config.dataset).stem().string());
}

absl::StatusOr<RunRecord> RunExperimentOnData(const ExperimentConfig& config,
                                              const tabular::Dataset& data,
                                              std::string dataset_name) {
  if (absl::Status status = config.Validate(); !status.ok()) {
    return Staged("config", status);
  }
  auto workspace = PrepareWorkspace(data, config.jury, config.folds, config.seed);
  if (!workspace.ok()) return Staged("prepare", workspace.status());
  const Workspace& ws = *workspace;

  RunRecord record;
  record.config = config;
  record.dataset_name = std::move(dataset_name);
  record.schema = data.schema;
  record.target_name = data.target_name;
  record.target_class = data.target_class;
  for (const auto& label : data.labels) {
    if (label != data.target_class) {
      record.other_class = label;
      break;
    }
  }
  record.dropped_rows = data.dropped_count;
  for (const auto& member : ws.jury.members) {
    record.jury_weights.emplace_back(member.name, member.weight);
  }

  std::vector<size_t> candidates;
  for (size_t r = 0; r < data.num_rows(); ++r) {
    if (!data.IsTarget(r)) candidates.push_back(r);
  }
  if (candidates.size() < static_cast<size_t>(config.queries)) {
    return Staged("sample", absl::InvalidArgumentError(absl::StrCat(
                                "Requested ", config.queries, " queries but only ",
                                candidates.size(), " non-target rows exist")));
  }
  std::mt19937_64 rng(config.seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  record.query_rows.assign(candidates.begin(), candidates.begin() + config.queries);
  for (const size_t q : record.query_rows) record.query_values.push_back(data.rows[q]);

  const size_t num_targets = ws.encoded.TargetRows().size();
  const int neighbors =
      static_cast<int>(std::min<size_t>(metrics::kDefaultCentralityNeighbors, num_targets));

  for (const GeneratorKind generator : config.generators) {
    for (const engine::Preference preference : config.preferences) {
      std::vector<double> proximity, sparsity, validity, fidelity, centrality, seconds;
      size_t ce_count = 0;
      for (const size_t q : record.query_rows) {
        const std::vector<double>& query = ws.encoded.rows[q];
        QueryResult result;
        result.query_row = q;
        result.generator = generator;
        result.preference = preference;

        const auto start = std::chrono::steady_clock::now();
        absl::Status status;
        switch (generator) {
          case GeneratorKind::kTcol: {
            engine::GenerationConfig gen;
            gen.preference = preference;
            gen.depth = config.depth;
            gen.num_ces = config.num_ces;
            gen.candidate_budget = config.budget;
            auto generation = engine::Generate(ws.encoded, query, gen, *ws.validation_model);
            status = generation.status();
            if (generation.ok()) {
              result.ces = std::move(generation->ces);
              result.warnings = std::move(generation->warnings);
            }
            break;
          }
          case GeneratorKind::kNearestTarget: {
            auto ces = BaselineNearestTarget(ws.encoded, query, config.num_ces,
                                             *ws.validation_model);
            status = ces.status();
            if (ces.ok()) result.ces = *std::move(ces);
            break;
          }
          case GeneratorKind::kRandomPath: {
            auto generation = BaselineRandomPath(ws.encoded, query, config.num_ces,
                                                 config.seed ^ (q * 0x9e3779b97f4a7c15ULL),
                                                 *ws.validation_model);
            status = generation.status();
            if (generation.ok()) {
              result.ces = std::move(generation->ces);
              result.warnings = std::move(generation->warnings);
            }
            break;
          }
        }
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!status.ok()) return Staged("generate", status);

        for (const auto& ce : result.ces) {
          ASSIGN_OR_RETURN(auto decoded,
                           DecodeByPath(data.rows[ce.prototype_row], data.rows[q], ce.path));
          result.decoded.push_back(std::move(decoded));
        }
        seconds.push_back(result.seconds);
        if (!result.ces.empty()) {
          std::vector<std::vector<double>> vectors;
          for (const auto& ce : result.ces) vectors.push_back(ce.vector.values);
          auto add = [&](std::vector<double>& into,
                         const absl::StatusOr<double>& value) -> absl::Status {
            if (!value.ok()) return Staged("metrics", value.status());
            into.push_back(*value);
            return absl::OkStatus();
          };
          RETURN_IF_ERROR(add(proximity, metrics::Proximity(vectors, query)));
          RETURN_IF_ERROR(add(sparsity, metrics::Sparsity(vectors, query)));
          RETURN_IF_ERROR(add(validity, metrics::Validity(vectors, *ws.validation_model)));
          RETURN_IF_ERROR(add(fidelity, metrics::DataFidelity(vectors, ws.jury)));
          auto central = metrics::MeanCentrality(vectors, ws.encoded, neighbors);
          if (!central.ok()) return Staged("metrics", central.status());
          if (!std::isnan(*central)) centrality.push_back(*central);
          ce_count += result.ces.size();
        }
        record.results.push_back(std::move(result));
      }
      metrics::MetricsReport row;
      row.dataset = record.dataset_name;
      row.generator = std::string(GeneratorName(generator));
      row.preference = engine::PreferenceTag(preference);
      row.proximity = MeanOf(proximity);
      row.sparsity = MeanOf(sparsity);
      row.validity = MeanOf(validity);
      row.data_fidelity = MeanOf(fidelity);
      row.centrality = MeanOf(centrality);
      row.runtime_seconds = MeanOf(seconds);
      row.queries = record.query_rows.size();
      row.ces = ce_count;
      record.table.push_back(std::move(row));
    }
  }
  return record;
}

}  // namespace prefcf::experiment
