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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "prefcf/csv.h"
#include "prefcf/engine.h"
#include "prefcf/experiment.h"
#include "prefcf/metrics.h"
#include "prefcf/models.h"
#include "prefcf/report.h"
#include "prefcf/scoring.h"
#include "prefcf/status_macros.h"
#include "prefcf/tabular.h"

namespace {

using nlohmann::json;
using namespace prefcf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

struct DataArgs {
  std::string data;
  std::string schema;
};

void AddDataOptions(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.data, "Dataset CSV")->required();
  cmd->add_option("--schema", args.schema, "Schema JSON")->required();
}

absl::StatusOr<tabular::Dataset> LoadData(const DataArgs& args) {
  ASSIGN_OR_RETURN(const tabular::Schema schema, tabular::LoadSchema(args.schema));
  return tabular::LoadCsv(args.data, schema);
}

absl::Status WriteOrPrint(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return absl::OkStatus();
  }
  return csv::WriteFile(path, content);
}

absl::StatusOr<std::unique_ptr<models::ClassifierModel>> ValidationModel(
    const std::string& model_path, const tabular::EncodedData& encoded, uint64_t seed) {
  if (!model_path.empty()) return models::LoadModel(model_path);
  return models::FitBuiltin(models::ModelKind::kRandomForest, encoded, seed);
}

absl::StatusOr<std::vector<models::ModelKind>> ParseJury(
    const std::vector<std::string>& names) {
  std::vector<models::ModelKind> kinds;
  for (const auto& name : names) {
    ASSIGN_OR_RETURN(const auto kind, models::ParseModelKind(name));
    kinds.push_back(kind);
  }
  return kinds;
}

// encode

struct EncodeArgs {
  DataArgs data;
  std::string out;
};

absl::Status RunEncode(const EncodeArgs& args) {
  ASSIGN_OR_RETURN(const auto data, LoadData(args.data));
  ASSIGN_OR_RETURN(const auto encoder, tabular::Encoder::Fit(data));
  return WriteOrPrint(args.out, encoder.ToJson().dump(2) + "\n");
}

// train

struct TrainArgs {
  DataArgs data;
  std::string out_dir;
  std::vector<std::string> jury = {"knn", "naive_bayes", "decision_tree"};
  int folds = 10;
  uint64_t seed = 0;
};

absl::Status RunTrain(const TrainArgs& args) {
  ASSIGN_OR_RETURN(const auto data, LoadData(args.data));
  ASSIGN_OR_RETURN(const auto kinds, ParseJury(args.jury));
  ASSIGN_OR_RETURN(const auto ws, experiment::PrepareWorkspace(data, kinds, args.folds,
                                                               args.seed));
  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec) {
    return absl::InternalError(absl::StrCat("Cannot create ", args.out_dir, ": ", ec.message()));
  }
  const std::filesystem::path dir(args.out_dir);
  RETURN_IF_ERROR(csv::WriteFile((dir / "encoder.json").string(),
                                 ws.encoder.ToJson().dump(2) + "\n"));
  RETURN_IF_ERROR(
      models::SaveModel(*ws.validation_model, (dir / "validation_model.json").string()));
  json members = json::array();
  for (const auto& member : ws.jury.members) {
    const std::string file = absl::StrCat("jury_", member.name, ".json");
    RETURN_IF_ERROR(models::SaveModel(*member.model, (dir / file).string()));
    members.push_back({{"name", member.name}, {"weight", member.weight}, {"file", file}});
  }
  const json manifest = {{"protocol", ws.jury.protocol}, {"members", members}};
  RETURN_IF_ERROR(csv::WriteFile((dir / "jury.json").string(), manifest.dump(2) + "\n"));
  for (const auto& member : ws.jury.members) {
    std::cout << member.name << " weight " << member.weight << "\n";
  }
  return absl::OkStatus();
}

absl::StatusOr<models::ThirdPartyJury> LoadJury(const std::string& dir) {
  const std::filesystem::path root(dir);
  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile((root / "jury.json").string()));
  models::ThirdPartyJury jury;
  try {
    const json manifest = json::parse(text);
    jury.protocol = manifest.value("protocol", std::string());
    for (const auto& entry : manifest.at("members")) {
      models::JuryMember member;
      member.name = entry.at("name").get<std::string>();
      member.weight = entry.at("weight").get<double>();
      ASSIGN_OR_RETURN(
          auto model,
          models::LoadModel((root / entry.at("file").get<std::string>()).string()));
      member.model = std::move(model);
      jury.members.push_back(std::move(member));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("Malformed jury manifest: ", e.what()));
  }
  return jury;
}

// generate

struct GenerateArgs {
  DataArgs data;
  size_t query_index = 0;
  std::string preference = "c";
  int num_ces = 5;
  int depth = 3;
  int budget = 64;
  std::string distance = "euclidean";
  std::string fcs_variant = "sparsity_corrected";
  uint64_t seed = 0;
  std::string model;
  std::string out;
};

constexpr const char* kCeColumns[] = {"role", "validated", "fallback"};

std::vector<std::string> CeRow(const std::string& role, bool validated, bool fallback,
                               const tabular::RawRow& values) {
  std::vector<std::string> fields = {role, validated ? "1" : "0", fallback ? "1" : "0"};
  for (const auto& value : values) fields.push_back(tabular::FormatValue(value));
  return fields;
}

absl::Status RunGenerate(const GenerateArgs& args) {
  ASSIGN_OR_RETURN(const auto data, LoadData(args.data));
  if (args.query_index >= data.num_rows()) {
    return absl::OutOfRangeError(absl::StrCat("Query index ", args.query_index,
                                              " outside [0, ", data.num_rows(), ")"));
  }
  engine::GenerationConfig config;
  ASSIGN_OR_RETURN(config.preference, engine::ParsePreference(args.preference));
  ASSIGN_OR_RETURN(config.distance, scoring::ParseDistance(args.distance));
  ASSIGN_OR_RETURN(config.fcs_variant, scoring::ParseFcsVariant(args.fcs_variant));
  config.num_ces = args.num_ces;
  config.depth = args.depth;
  config.candidate_budget = args.budget;
  RETURN_IF_ERROR(config.Validate());

  ASSIGN_OR_RETURN(const auto encoder, tabular::Encoder::Fit(data));
  ASSIGN_OR_RETURN(const auto encoded, tabular::EncodeDataset(encoder, data));
  ASSIGN_OR_RETURN(const auto model, ValidationModel(args.model, encoded, args.seed));
  const auto& query = encoded.rows[args.query_index];
  ASSIGN_OR_RETURN(const auto generation, engine::Generate(encoded, query, config, *model));
  for (const auto& warning : generation.warnings) std::cerr << "warning: " << warning << "\n";

  std::vector<std::string> header(std::begin(kCeColumns), std::end(kCeColumns));
  for (const auto& feature : data.schema) header.push_back(feature.name);
  std::string out = csv::JoinRow(header) + "\n";
  const auto& query_raw = data.rows[args.query_index];
  out += csv::JoinRow(CeRow("query", model->Predict(query) == 1, false, query_raw)) + "\n";
  for (const auto& ce : generation.ces) {
    ASSIGN_OR_RETURN(const auto decoded,
                     experiment::DecodeByPath(data.rows[ce.prototype_row], query_raw, ce.path));
    out += csv::JoinRow(CeRow("ce", ce.validated, ce.fallback, decoded)) + "\n";
  }
  return WriteOrPrint(args.out, out);
}

// evaluate

struct EvaluateArgs {
  DataArgs data;
  std::string ces;
  std::string model;
  std::string jury_dir;
  std::vector<std::string> jury = {"knn", "naive_bayes", "decision_tree"};
  int folds = 10;
  int neighbors = metrics::kDefaultCentralityNeighbors;
  uint64_t seed = 0;
  std::string out;
};

absl::Status RunEvaluate(const EvaluateArgs& args) {
  ASSIGN_OR_RETURN(const auto data, LoadData(args.data));
  ASSIGN_OR_RETURN(const auto encoder, tabular::Encoder::Fit(data));
  ASSIGN_OR_RETURN(const auto encoded, tabular::EncodeDataset(encoder, data));

  ASSIGN_OR_RETURN(const std::string text, csv::ReadFile(args.ces));
  ASSIGN_OR_RETURN(const auto records, csv::Parse(text));
  if (records.empty()) return absl::InvalidArgumentError("CE file is empty");
  const auto& header = records.front().fields;
  const size_t offset = std::size(kCeColumns);
  if (header.size() != offset + data.num_features() || header[0] != "role") {
    return absl::InvalidArgumentError("CE file header does not match the schema");
  }
  for (size_t f = 0; f < data.num_features(); ++f) {
    if (header[offset + f] != data.schema[f].name) {
      return absl::InvalidArgumentError(
          absl::StrCat("CE file column ", offset + f, " should be ", data.schema[f].name));
    }
  }
  std::vector<double> query;
  bool have_query = false;
  std::vector<std::vector<double>> ces;
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& record = records[i];
    if (record.fields.size() != header.size()) {
      return absl::DataLossError(absl::StrCat("Line ", record.line, ": expected ",
                                              header.size(), " fields"));
    }
    tabular::RawRow raw;
    for (size_t f = 0; f < data.num_features(); ++f) {
      ASSIGN_OR_RETURN(auto value,
                       tabular::ParseCell(data.schema[f], record.fields[offset + f]));
      raw.push_back(std::move(value));
    }
    ASSIGN_OR_RETURN(auto vector, encoder.Encode(raw));
    if (record.fields[0] == "query") {
      if (have_query) return absl::InvalidArgumentError("CE file has two query rows");
      query = std::move(vector);
      have_query = true;
    } else if (record.fields[0] == "ce") {
      ces.push_back(std::move(vector));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("Line ", record.line, ": unknown role \"", record.fields[0], "\""));
    }
  }
  if (!have_query) return absl::InvalidArgumentError("CE file has no query row");
  if (ces.empty()) return absl::InvalidArgumentError("CE file has no CE rows");

  ASSIGN_OR_RETURN(const auto model, ValidationModel(args.model, encoded, args.seed));
  models::ThirdPartyJury jury;
  if (!args.jury_dir.empty()) {
    ASSIGN_OR_RETURN(jury, LoadJury(args.jury_dir));
  } else {
    ASSIGN_OR_RETURN(const auto kinds, ParseJury(args.jury));
    ASSIGN_OR_RETURN(jury, models::CvWeights(kinds, encoded, args.folds, args.seed));
  }
  ASSIGN_OR_RETURN(const double proximity, metrics::Proximity(ces, query));
  ASSIGN_OR_RETURN(const double sparsity, metrics::Sparsity(ces, query));
  ASSIGN_OR_RETURN(const double validity, metrics::Validity(ces, *model));
  ASSIGN_OR_RETURN(const double fidelity, metrics::DataFidelity(ces, jury));
  ASSIGN_OR_RETURN(const double centrality,
                   metrics::MeanCentrality(ces, encoded, args.neighbors));
  const json result = {{"ces", ces.size()},
                       {"proximity", proximity},
                       {"sparsity", sparsity},
                       {"validity", validity},
                       {"data_fidelity", fidelity},
                       {"centrality", report::FormatMetric(centrality, 6) == "nan"
                                          ? json(nullptr)
                                          : json(centrality)}};
  return WriteOrPrint(args.out, result.dump(2) + "\n");
}

// bench

struct BenchArgs {
  std::string config;
  std::string structured;
};

absl::Status RunBench(const BenchArgs& args) {
  ASSIGN_OR_RETURN(const auto config, experiment::LoadExperimentConfig(args.config));
  ASSIGN_OR_RETURN(const auto record, experiment::RunExperiment(config));
  RETURN_IF_ERROR(report::EmitReport(record, report::ReportFormat::kCsv, config.out));
  if (!args.structured.empty()) {
    RETURN_IF_ERROR(
        report::EmitReport(record, report::ReportFormat::kStructured, args.structured));
  }
  std::cout << "wrote " << record.table.size() << " rows to " << config.out << "\n";
  return absl::OkStatus();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-conditioned counterfactual explanations for tabular data"};
  app.require_subcommand(1);

  EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "Fit the feature encoder and dump it");
  AddDataOptions(encode_cmd, encode.data);
  encode_cmd->add_option("--out", encode.out, "Output JSON (stdout if omitted)");

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train", "Fit the validation model and jury and save them");
  AddDataOptions(train_cmd, train.data);
  train_cmd->add_option("--out-dir", train.out_dir, "Output directory")->required();
  train_cmd->add_option("--jury", train.jury, "Jury model kinds");
  train_cmd->add_option("--folds", train.folds, "Cross-validation folds");
  train_cmd->add_option("--seed", train.seed, "Random seed");

  GenerateArgs generate;
  auto* generate_cmd = app.add_subcommand("generate", "Generate CEs for one query row");
  AddDataOptions(generate_cmd, generate.data);
  generate_cmd->add_option("--query-index", generate.query_index, "Query row (0-based)")
      ->required();
  generate_cmd->add_option("--preference", generate.preference, "Preference a|b|c|d|e")
      ->check(CLI::IsMember({"a", "b", "c", "d", "e"}));
  generate_cmd->add_option("--num-ces", generate.num_ces, "Number of CEs");
  generate_cmd->add_option("--depth", generate.depth, "Local tree depth (3-9)");
  generate_cmd->add_option("--budget", generate.budget, "Candidate paths per prototype");
  generate_cmd->add_option("--distance", generate.distance, "euclidean|manhattan")
      ->check(CLI::IsMember({"euclidean", "manhattan"}));
  generate_cmd->add_option("--fcs-variant", generate.fcs_variant, "literal|sparsity_corrected")
      ->check(CLI::IsMember({"literal", "sparsity_corrected"}));
  generate_cmd->add_option("--seed", generate.seed, "Seed for the validation model");
  generate_cmd->add_option("--model", generate.model, "Saved validation model");
  generate_cmd->add_option("--out", generate.out, "Output CSV (stdout if omitted)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute metrics for a CE file");
  AddDataOptions(evaluate_cmd, evaluate.data);
  evaluate_cmd->add_option("--ces", evaluate.ces, "CE CSV written by generate")->required();
  evaluate_cmd->add_option("--model", evaluate.model, "Saved validation model");
  evaluate_cmd->add_option("--jury-dir", evaluate.jury_dir, "Directory written by train");
  evaluate_cmd->add_option("--jury", evaluate.jury, "Jury model kinds");
  evaluate_cmd->add_option("--folds", evaluate.folds, "Cross-validation folds");
  evaluate_cmd->add_option("--neighbors", evaluate.neighbors, "Centrality neighbors");
  evaluate_cmd->add_option("--seed", evaluate.seed, "Random seed");
  evaluate_cmd->add_option("--out", evaluate.out, "Output JSON (stdout if omitted)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark config");
  bench_cmd->add_option("--config", bench.config, "Experiment config JSON")->required();
  bench_cmd->add_option("--structured", bench.structured, "Also write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  absl::Status status;
  if (*encode_cmd) {
    status = RunEncode(encode);
  } else if (*train_cmd) {
    status = RunTrain(train);
  } else if (*generate_cmd) {
    status = RunGenerate(generate);
  } else if (*evaluate_cmd) {
    status = RunEvaluate(evaluate);
  } else if (*bench_cmd) {
    status = RunBench(bench);
  }
  if (!status.ok()) {
    std::cerr << "error: " << status.message() << "\n";
  }
  return ExitCodeFor(status);
}
