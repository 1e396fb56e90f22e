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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "prefcf/csv.h"
#include "test_support.h"

namespace prefcf::tabular {
namespace {

using testing::CreditLikeSchema;

Dataset MustParse(const std::string& text, const Schema& schema = CreditLikeSchema()) {
  auto data = ParseCsvDataset(text, schema);
  EXPECT_TRUE(data.ok()) << data.status();
  return data.ok() ? *data : Dataset{};
}

TEST(Csv, ParsesQuotedFieldsAndSkipsBlankLines) {
  auto records = csv::Parse("a,b\n\n\"x,1\",\"say \"\"hi\"\"\"\n");
  ASSERT_TRUE(records.ok()) << records.status();
  ASSERT_EQ(records->size(), 2u);
  EXPECT_EQ((*records)[1].fields[0], "x,1");
  EXPECT_EQ((*records)[1].fields[1], "say \"hi\"");
  EXPECT_EQ((*records)[1].line, 3u);
}

TEST(Csv, UnterminatedQuoteReportsLine) {
  auto records = csv::Parse("a,b\n1,2\n3,\"oops\n");
  ASSERT_FALSE(records.ok());
  EXPECT_EQ(records.status().code(), absl::StatusCode::kDataLoss);
  EXPECT_NE(std::string(records.status().message()).find("line 3"), std::string::npos)
      << records.status();
}

TEST(Csv, EscapeRoundTrips) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\""};
  auto records = csv::Parse(csv::JoinRow(fields) + "\n");
  ASSERT_TRUE(records.ok());
  EXPECT_EQ(records->front().fields, fields);
}

TEST(Csv, MissingFileIsNotFound) {
  EXPECT_EQ(csv::ReadFile("/nonexistent/file.csv").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(Schema, JsonRoundTrip) {
  const Schema schema = CreditLikeSchema();
  auto back = SchemaFromJson(SchemaToJson(schema));
  ASSERT_TRUE(back.ok()) << back.status();
  ASSERT_EQ(back->features.size(), 3u);
  EXPECT_EQ(back->features[1].categories, schema.features[1].categories);
  EXPECT_TRUE(back->features[0].immutable());
  EXPECT_EQ(back->target_class, "yes");
}

TEST(Schema, RejectsMinAboveMax) {
  Schema schema = CreditLikeSchema();
  schema.features[2].min = 5.0;
  schema.features[2].max = 1.0;
  EXPECT_EQ(ValidateSchema(schema).code(), absl::StatusCode::kInvalidArgument);
}

TEST(Schema, RejectsEmptyCategoricalDomain) {
  Schema schema = CreditLikeSchema();
  schema.features[1].categories.clear();
  EXPECT_FALSE(ValidateSchema(schema).ok());
}

TEST(Schema, RejectsDuplicateNames) {
  Schema schema = CreditLikeSchema();
  schema.features[2].name = "age";
  EXPECT_FALSE(ValidateSchema(schema).ok());
}

TEST(Schema, BundledSchemasLoad) {
  for (const char* name :
       {"credit_synth.schema.json", "schemas/adult.schema.json", "schemas/german.schema.json",
        "schemas/titanic.schema.json", "schemas/water.schema.json",
        "schemas/phoneme.schema.json"}) {
    auto schema = LoadSchema(std::string(PREFCF_DATA_DIR) + "/" + name);
    EXPECT_TRUE(schema.ok()) << name << ": " << schema.status();
  }
}

TEST(Dataset, ThreeCompleteRows) {
  const Dataset data =
      MustParse("age,job,income,approved\n30,A,1.5,yes\n40,B,2.5,no\n50,C,3.5,yes\n");
  EXPECT_EQ(data.num_rows(), 3u);
  EXPECT_EQ(data.dropped_count, 0u);
  EXPECT_TRUE(data.IsTarget(0));
  EXPECT_FALSE(data.IsTarget(1));
}

TEST(Dataset, DropsRowsWithEmptyCells) {
  const Dataset data = MustParse(
      "age,job,income,approved\n30,A,1.5,yes\n,B,2.5,no\n50,C,3.5,no\n"
      "41, ,2,yes\n22,B,0.5,no\n");
  EXPECT_EQ(data.num_rows(), 3u);
  EXPECT_EQ(data.dropped_count, 2u);
}

TEST(Dataset, HeaderOrderIsFree) {
  const Dataset data = MustParse("income,approved,job,age\n1.5,yes,B,30\n2,no,A,31\n");
  EXPECT_EQ(std::get<double>(data.rows[0][0]), 30.0);
  EXPECT_EQ(std::get<std::string>(data.rows[0][1]), "B");
  EXPECT_EQ(std::get<double>(data.rows[0][2]), 1.5);
}

TEST(Dataset, UnknownCategoryIsSchemaViolation) {
  auto data = ParseCsvDataset("age,job,income,approved\n30,A,1,yes\n40,Z,2,no\n",
                              CreditLikeSchema());
  ASSERT_FALSE(data.ok());
  EXPECT_EQ(data.status().code(), absl::StatusCode::kInvalidArgument);
  const std::string message(data.status().message());
  EXPECT_NE(message.find("job"), std::string::npos) << message;
  EXPECT_NE(message.find("Z"), std::string::npos) << message;
}

TEST(Dataset, WrongFieldCountIsDataLoss) {
  auto data =
      ParseCsvDataset("age,job,income,approved\n30,A,1,yes\n40,B,no\n", CreditLikeSchema());
  ASSERT_FALSE(data.ok());
  EXPECT_EQ(data.status().code(), absl::StatusCode::kDataLoss);
  EXPECT_NE(std::string(data.status().message()).find("line 3"), std::string::npos);
}

TEST(Dataset, NeedsExactlyTwoLabels) {
  EXPECT_FALSE(ParseCsvDataset("age,job,income,approved\n30,A,1,yes\n40,B,2,yes\n",
                               CreditLikeSchema())
                   .ok());
  EXPECT_FALSE(ParseCsvDataset(
                   "age,job,income,approved\n30,A,1,yes\n40,B,2,no\n41,B,2,maybe\n",
                   CreditLikeSchema())
                   .ok());
}

TEST(Dataset, MissingTargetClassIsError) {
  Schema schema = CreditLikeSchema();
  schema.target_class = "approved_yes";
  EXPECT_FALSE(ParseCsvDataset("age,job,income,approved\n30,A,1,yes\n40,B,2,no\n", schema)
                   .ok());
}

TEST(Dataset, ExtraOrMissingColumnsRejected) {
  EXPECT_FALSE(ParseCsvDataset("age,job,income,extra,approved\n30,A,1,0,yes\n40,B,2,0,no\n",
                               CreditLikeSchema())
                   .ok());
  EXPECT_FALSE(
      ParseCsvDataset("age,job,approved\n30,A,yes\n40,B,no\n", CreditLikeSchema()).ok());
}

TEST(Dataset, NumericDomainEnforced) {
  Schema schema = CreditLikeSchema();
  schema.features[0].min = 18.0;
  schema.features[0].max = 99.0;
  EXPECT_FALSE(
      ParseCsvDataset("age,job,income,approved\n12,A,1,yes\n40,B,2,no\n", schema).ok());
}

TEST(Encoder, TargetRatesBeforeScaling) {
  // A: 3 rows all target, B: 3 rows none, C: mixed.
  const Dataset data = MustParse(
      "age,job,income,approved\n1,A,1,yes\n2,A,2,yes\n3,A,3,yes\n"
      "4,B,4,no\n5,B,5,no\n6,B,6,no\n7,C,7,yes\n8,C,8,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok()) << encoder.status();
  EXPECT_EQ(*encoder->CategoryRate(1, "A"), 1.0);
  EXPECT_EQ(*encoder->CategoryRate(1, "B"), 0.0);
  EXPECT_EQ(*encoder->CategoryRate(1, "C"), 0.5);
  auto encoded = encoder->Encode(data.rows[6]);
  ASSERT_TRUE(encoded.ok());
  EXPECT_DOUBLE_EQ((*encoded)[1], 0.5);
}

TEST(Encoder, NumericMidpointAndClamp) {
  const Dataset data =
      MustParse("age,job,income,approved\n10,A,1,yes\n20,B,2,no\n15,A,3,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  auto mid = encoder->Encode({15.0, std::string("A"), 2.0});
  ASSERT_TRUE(mid.ok());
  EXPECT_DOUBLE_EQ((*mid)[0], 0.5);
  auto low = encoder->Encode({3.0, std::string("A"), 9.0});
  ASSERT_TRUE(low.ok());
  EXPECT_EQ((*low)[0], 0.0);
  EXPECT_EQ((*low)[2], 1.0);
}

TEST(Encoder, ConstantFeatureEncodesToHalf) {
  const Dataset data =
      MustParse("age,job,income,approved\n7,A,1,yes\n7,B,2,no\n7,C,3,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  for (const auto& row : data.rows) {
    EXPECT_EQ((*encoder->Encode(row))[0], 0.5);
  }
}

TEST(Encoder, UnseenCategoryIsError) {
  const Dataset data = MustParse("age,job,income,approved\n1,A,1,yes\n2,B,2,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  EXPECT_FALSE(encoder->Encode({1.0, std::string("C"), 1.0}).ok());
}

TEST(Encoder, BundledDatasetRoundTripAndRange) {
  auto schema = LoadSchema(std::string(PREFCF_DATA_DIR) + "/credit_synth.schema.json");
  ASSERT_TRUE(schema.ok());
  auto data = LoadCsv(std::string(PREFCF_DATA_DIR) + "/credit_synth.csv", *schema);
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->num_rows(), 200u);
  auto encoder = Encoder::Fit(*data);
  ASSERT_TRUE(encoder.ok());
  for (const auto& row : data->rows) {
    auto encoded = encoder->Encode(row);
    ASSERT_TRUE(encoded.ok());
    for (double v : *encoded) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(*encoder->Encode(row), *encoded);
    auto decoded = encoder->Decode(*encoded);
    ASSERT_TRUE(decoded.ok());
    for (size_t f = 0; f < row.size(); ++f) {
      if (data->schema[f].categorical()) {
        EXPECT_EQ(std::get<std::string>((*decoded)[f]), std::get<std::string>(row[f]));
      } else {
        EXPECT_NEAR(std::get<double>((*decoded)[f]), std::get<double>(row[f]), 1e-9);
      }
    }
  }
}

TEST(Encoder, JsonRoundTripPreservesEncoding) {
  const Dataset data = MustParse(
      "age,job,income,approved\n10,A,1,yes\n20,B,2,no\n15,C,3,no\n18,A,5,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  auto restored = Encoder::FromJson(encoder->ToJson());
  ASSERT_TRUE(restored.ok()) << restored.status();
  for (const auto& row : data.rows) {
    EXPECT_EQ(*encoder->Encode(row), *restored->Encode(row));
  }
}

TEST(Encoder, EncodeDatasetMarksTargetAndImmutables) {
  const Dataset data =
      MustParse("age,job,income,approved\n10,A,1,yes\n20,B,2,no\n15,C,3,no\n");
  auto encoder = Encoder::Fit(data);
  ASSERT_TRUE(encoder.ok());
  auto encoded = EncodeDataset(*encoder, data);
  ASSERT_TRUE(encoded.ok());
  EXPECT_EQ(encoded->labels, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(encoded->immutable, (std::vector<bool>{true, false, false}));
  EXPECT_EQ(encoded->TargetRows(), (std::vector<size_t>{0}));
}

TEST(Values, FormatIsShortest) {
  EXPECT_EQ(FormatValue(2.5), "2.5");
  EXPECT_EQ(FormatValue(40.0), "40");
  EXPECT_EQ(FormatValue(std::string("x")), "x");
}

}  // namespace
}  // namespace prefcf::tabular
