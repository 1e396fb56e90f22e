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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "prefcf/csv.h"
#include "prefcf/report.h"
#include "test_support.h"

namespace prefcf::experiment {
namespace {

using nlohmann::json;
using testing::MakeEncoded;
using V = std::vector<double>;

const std::string kData = std::string(PREFCF_DATA_DIR) + "/credit_synth.csv";
const std::string kSchema = std::string(PREFCF_DATA_DIR) + "/credit_synth.schema.json";

tabular::Dataset Bundled() {
  auto schema = tabular::LoadSchema(kSchema);
  EXPECT_TRUE(schema.ok());
  auto data = tabular::LoadCsv(kData, *schema);
  EXPECT_TRUE(data.ok());
  return *data;
}

ExperimentConfig SmallConfig() {
  ExperimentConfig config;
  config.dataset = kData;
  config.schema = kSchema;
  config.queries = 4;
  config.folds = 5;
  config.out = "unused.csv";
  return config;
}

TEST(Config, ParsesAndResolvesRelativePaths) {
  const json root = {{"dataset", "d.csv"},      {"schema", "/abs/s.json"},
                     {"out", "out/r.csv"},      {"preferences", {"a", "e"}},
                     {"generators", {"tcol", "random_path"}},
                     {"queries", 3},            {"seed", 11},
                     {"jury", {"knn", "decision_tree"}}};
  auto config = ExperimentConfig::FromJson(root, "/base");
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_EQ(config->dataset, "/base/d.csv");
  EXPECT_EQ(config->schema, "/abs/s.json");
  EXPECT_EQ(config->out, "/base/out/r.csv");
  EXPECT_EQ(config->preferences.size(), 2u);
  EXPECT_EQ(config->generators.back(), GeneratorKind::kRandomPath);
  EXPECT_EQ(config->queries, 3);
  EXPECT_EQ(config->seed, 11u);
  EXPECT_EQ(config->depth, 3);
  EXPECT_EQ(config->num_ces, 5);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const json base = {{"dataset", "d.csv"}, {"schema", "s.json"}, {"out", "o.csv"}};
  EXPECT_TRUE(ExperimentConfig::FromJson(base).ok());
  json extra = base;
  extra["tolerance"] = 1;
  EXPECT_FALSE(ExperimentConfig::FromJson(extra).ok());
  json no_out = base;
  no_out.erase("out");
  EXPECT_FALSE(ExperimentConfig::FromJson(no_out).ok());
  json zero = base;
  zero["queries"] = 0;
  EXPECT_FALSE(ExperimentConfig::FromJson(zero).ok());
  json bad_pref = base;
  bad_pref["preferences"] = {"z"};
  EXPECT_FALSE(ExperimentConfig::FromJson(bad_pref).ok());
  json bad_type = base;
  bad_type["queries"] = "ten";
  EXPECT_FALSE(ExperimentConfig::FromJson(bad_type).ok());
}

TEST(Config, ToJsonRoundTrips) {
  ExperimentConfig config = SmallConfig();
  config.generators = {GeneratorKind::kTcol, GeneratorKind::kNearestTarget};
  auto back = ExperimentConfig::FromJson(config.ToJson());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->ToJson(), config.ToJson());
}

TEST(Config, BundledBenchConfigLoads) {
  auto config = LoadExperimentConfig(std::string(PREFCF_DATA_DIR) + "/credit_synth.bench.json");
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_TRUE(std::filesystem::exists(config->dataset));
  EXPECT_EQ(config->generators.size(), 3u);
}

TEST(NearestTarget, Examples) {
  const V query = {0.4, 0.4};
  const auto data = MakeEncoded({{0.9, 0.9}, {0.4, 0.4}, {0.5, 0.4}, {0.1, 0.1}, {0.0, 0.0}},
                                {1, 1, 1, 1, 0});
  const auto model = testing::AlwaysTarget();
  auto one = BaselineNearestTarget(data, query, 1, model);
  ASSERT_TRUE(one.ok());
  EXPECT_EQ(one->front().vector.values, query);
  EXPECT_FALSE(BaselineNearestTarget(data, query, 5, model).ok());
  auto three = BaselineNearestTarget(data, query, 3, model);
  ASSERT_TRUE(three.ok());
  std::vector<std::pair<double, size_t>> oracle;
  for (size_t r : data.TargetRows()) oracle.emplace_back(testing::RefEuclid(data.rows[r], query), r);
  std::sort(oracle.begin(), oracle.end());
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ((*three)[i].prototype_row, oracle[i].second);
    EXPECT_EQ((*three)[i].vector.values, data.rows[oracle[i].second]);
  }
}

TEST(RandomPath, DeterministicValidatedAndImmutable) {
  std::mt19937_64 rng(3);
  std::vector<V> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back(testing::RandomVector(rng, 6));
    labels.push_back(i % 3 == 0);
  }
  const auto data = MakeEncoded(rows, labels, {true, false, false, true, false, false});
  testing::FunctionModel model([](std::span<const double> r) { return r[1] + r[4] > 0.8; });
  auto a = BaselineRandomPath(data, rows[1], 5, 99, model);
  auto b = BaselineRandomPath(data, rows[1], 5, 99, model);
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_EQ(a->ces.size(), b->ces.size());
  for (size_t i = 0; i < a->ces.size(); ++i) {
    EXPECT_EQ(a->ces[i].vector.values, b->ces[i].vector.values);
    EXPECT_EQ(model.Predict(a->ces[i].vector.values), 1);
    EXPECT_EQ(a->ces[i].vector.values[0], rows[1][0]);
    EXPECT_EQ(a->ces[i].vector.values[3], rows[1][3]);
  }
}

TEST(RandomPath, AllImmutableGivesQuery) {
  const V query = {0.3, 0.6};
  const auto data = MakeEncoded({{0.9, 0.1}, {0.2, 0.2}, query}, {1, 1, 0}, {true, true});
  const auto model = testing::AlwaysTarget();
  auto generation = BaselineRandomPath(data, query, 3, 1, model);
  ASSERT_TRUE(generation.ok());
  ASSERT_FALSE(generation->ces.empty());
  for (const auto& ce : generation->ces) EXPECT_EQ(ce.vector.values, query);
}

TEST(RandomPath, NothingValidatesWarns) {
  const auto data = MakeEncoded({{0.9, 0.1}, {0.2, 0.2}}, {1, 0});
  const auto model = testing::NeverTarget();
  auto generation = BaselineRandomPath(data, V{0.2, 0.2}, 3, 1, model, 50);
  ASSERT_TRUE(generation.ok());
  EXPECT_TRUE(generation->ces.empty());
  EXPECT_EQ(generation->warnings.size(), 1u);
}

TEST(DecodeByPath, CopiesBySide) {
  const tabular::RawRow prototype = {30.0, std::string("A"), 2.5};
  const tabular::RawRow query = {40.0, std::string("B"), 1.5};
  auto decoded = DecodeByPath(prototype, query, engine::PathMask{{1, 0, 0}});
  ASSERT_TRUE(decoded.ok());
  EXPECT_EQ(*decoded, (tabular::RawRow{40.0, std::string("A"), 2.5}));
  EXPECT_FALSE(DecodeByPath(prototype, query, engine::PathMask{{1}}).ok());
}

TEST(RunExperiment, ZeroQueriesIsError) {
  ExperimentConfig config = SmallConfig();
  config.queries = 0;
  EXPECT_FALSE(RunExperiment(config).ok());
}

TEST(RunExperiment, MissingDatasetIsStageTagged) {
  ExperimentConfig config = SmallConfig();
  config.dataset = "/nonexistent.csv";
  auto record = RunExperiment(config);
  ASSERT_FALSE(record.ok());
  EXPECT_EQ(record.status().code(), absl::StatusCode::kNotFound);
  EXPECT_EQ(std::string(record.status().message()).rfind("[load]", 0), 0u);
}

TEST(RunExperiment, EmptyPreferenceListGivesHeaderOnly) {
  ExperimentConfig config = SmallConfig();
  config.preferences.clear();
  auto record = RunExperiment(config);
  ASSERT_TRUE(record.ok()) << record.status();
  EXPECT_EQ(report::CsvReport(*record), std::string(report::kCsvHeader) + "\n");
}

TEST(RunExperiment, CrossProductAndDecodedCes) {
  ExperimentConfig config = SmallConfig();
  config.generators = {GeneratorKind::kTcol, GeneratorKind::kNearestTarget};
  const tabular::Dataset data = Bundled();
  auto record = RunExperimentOnData(config, data, "credit_synth");
  ASSERT_TRUE(record.ok()) << record.status();
  EXPECT_EQ(record->table.size(), 10u);
  const std::string csv = report::CsvReport(*record);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "dataset,generator,preference,proximity,sparsity,validity,data_fidelity,"
            "centrality,runtime_s");

  auto encoder = tabular::Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  for (const auto& result : record->results) {
    ASSERT_EQ(result.decoded.size(), result.ces.size());
    EXPECT_GE(result.seconds, 0.0);
    const auto& query = data.rows[result.query_row];
    EXPECT_FALSE(data.IsTarget(result.query_row));
    for (size_t i = 0; i < result.ces.size(); ++i) {
      const auto& decoded = result.decoded[i];
      EXPECT_TRUE(tabular::ValidateRow(data.schema, decoded).ok());
      auto encoded = encoder->Encode(decoded);
      ASSERT_TRUE(encoded.ok());
      EXPECT_EQ(*encoded, result.ces[i].vector.values);
      auto again = encoder->Decode(*encoded);
      ASSERT_TRUE(again.ok());
      for (size_t f = 0; f < decoded.size(); ++f) {
        if (data.schema[f].categorical()) {
          EXPECT_EQ((*again)[f], decoded[f]);
        } else {
          EXPECT_NEAR(std::get<double>((*again)[f]), std::get<double>(decoded[f]), 1e-9);
        }
        const auto& proto = data.rows[result.ces[i].prototype_row];
        EXPECT_TRUE(decoded[f] == query[f] || decoded[f] == proto[f]);
      }
    }
  }
}

TEST(RunExperiment, DeterministicForSeed) {
  ExperimentConfig config = SmallConfig();
  config.generators = {GeneratorKind::kTcol, GeneratorKind::kRandomPath};
  const tabular::Dataset data = Bundled();
  auto a = RunExperimentOnData(config, data, "x");
  auto b = RunExperimentOnData(config, data, "x");
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->query_rows, b->query_rows);
  ASSERT_EQ(a->table.size(), b->table.size());
  for (size_t i = 0; i < a->table.size(); ++i) {
    EXPECT_EQ(a->table[i].proximity, b->table[i].proximity);
    EXPECT_EQ(a->table[i].data_fidelity, b->table[i].data_fidelity);
  }
  config.seed = 1;
  auto c = RunExperimentOnData(config, data, "x");
  ASSERT_TRUE(c.ok());
  EXPECT_NE(a->query_rows, c->query_rows);
}

TEST(Report, StructuredHasTableAndCeBlocks) {
  ExperimentConfig config = SmallConfig();
  config.preferences = {engine::Preference::kB};
  auto record = RunExperimentOnData(config, Bundled(), "credit_synth");
  ASSERT_TRUE(record.ok());
  const json report = report::StructuredReport(*record);
  EXPECT_EQ(report["table"].size(), 1u);
  EXPECT_EQ(report["queries"].size(), 4u);
  EXPECT_EQ(report["jury"].size(), 3u);
  const auto& block = report["queries"][0];
  EXPECT_EQ(block["query"]["approved"], "no");
  ASSERT_FALSE(block["ces"].empty());
  EXPECT_TRUE(block["ces"][0]["values"].contains("purpose"));
}

TEST(Report, UnwritablePathIsError) {
  ExperimentConfig config = SmallConfig();
  config.preferences.clear();
  auto record = RunExperiment(config);
  ASSERT_TRUE(record.ok());
  EXPECT_FALSE(
      report::EmitReport(*record, report::ReportFormat::kCsv, "/proc/prefcf/report.csv").ok());
}

TEST(Report, FormatMetric) {
  EXPECT_EQ(report::FormatMetric(0.5, 6), "0.500000");
  EXPECT_EQ(report::FormatMetric(std::nan(""), 6), "nan");
  EXPECT_EQ(report::FormatMetric(0.004, 2), "0.00");
}

}  // namespace
}  // namespace prefcf::experiment
