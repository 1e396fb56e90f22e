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

#include "prefcf/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "prefcf/engine.h"
#include "test_support.h"

namespace prefcf::metrics {
namespace {

using testing::MakeEncoded;
using testing::RandomVector;
using V = std::vector<double>;

models::ThirdPartyJury JuryOf(const std::vector<double>& weights,
                              const std::vector<double>& constant_proba) {
  models::ThirdPartyJury jury;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double p = constant_proba[i];
    jury.members.push_back({"m" + std::to_string(i),
                            std::make_shared<testing::FunctionModel>(
                                [p](std::span<const double>) { return p; }),
                            weights[i]});
  }
  return jury;
}

// 20 rows, 6 features, every other row target.
tabular::EncodedData Instance() {
  std::mt19937_64 rng(606);
  std::vector<V> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    rows.push_back(RandomVector(rng, 6));
    labels.push_back(i % 2);
  }
  return MakeEncoded(rows, labels);
}

double OracleCentrality(const V& ce, const tabular::EncodedData& data, int n) {
  V centroid(data.num_features(), 0.0);
  int count = 0;
  for (size_t r = 0; r < data.num_rows(); ++r) {
    if (!data.labels[r]) continue;
    ++count;
    for (size_t f = 0; f < centroid.size(); ++f) centroid[f] += data.rows[r][f];
  }
  for (double& c : centroid) c /= count;
  std::vector<std::pair<double, size_t>> order;
  for (size_t r = 0; r < data.num_rows(); ++r) {
    if (data.labels[r]) order.emplace_back(testing::RefEuclid(data.rows[r], centroid), r);
  }
  std::sort(order.begin(), order.end());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += order[i].first / testing::RefEuclid(data.rows[order[i].second], ce);
  }
  return sum / n;
}

TEST(Proximity, Examples) {
  const V query = {0.5, 0.5};
  EXPECT_EQ(*Proximity(std::vector<V>{query}, query), 0.0);
  EXPECT_NEAR(*Proximity(std::vector<V>{{0.7, 0.5}, {0.5, 0.1}}, query), 0.3, 1e-15);
  EXPECT_FALSE(Proximity(std::vector<V>{}, query).ok());
}

TEST(Sparsity, Examples) {
  const V query = {0.1, 0.2, 0.3};
  EXPECT_EQ(*Sparsity(std::vector<V>{query}, query), 0.0);
  EXPECT_EQ(*Sparsity(std::vector<V>{{0.9, 0.2, 0.3}, {0.9, 0.8, 0.7}}, query), 2.0);
}

TEST(Validity, Examples) {
  testing::FunctionModel model([](std::span<const double> r) { return r[0]; });
  EXPECT_EQ(*Validity(std::vector<V>{{0.9}, {0.6}}, model), 1.0);
  EXPECT_EQ(*Validity(std::vector<V>{{0.9}, {0.1}, {0.7}, {0.2}}, model), 0.5);
  EXPECT_FALSE(Validity(std::vector<V>{}, model).ok());
}

TEST(DataFidelity, AllMembersAgreeGivesOne) {
  const auto jury = JuryOf({0.3, 0.5, 0.2}, {1.0, 0.9, 0.6});
  EXPECT_EQ(*DataFidelity(std::vector<V>{{0.1}, {0.2}}, jury), 1.0);
}

TEST(DataFidelity, PublishedWeights) {
  const std::vector<double> adult = {0.73, 0.75, 0.74, 0.69, 0.74};
  const std::vector<double> half(5, 0.5);
  EXPECT_NEAR(*WeightedFidelity(adult, half), 0.5, 1e-15);
  const std::vector<double> german = {0.66, 0.67, 0.69, 0.65, 0.70};
  const auto jury = JuryOf(german, {1, 0, 1, 0, 1});
  EXPECT_NEAR(*DataFidelity(std::vector<V>{{0.3}, {0.4}}, jury), 0.6083086, 1e-5);
}

TEST(DataFidelity, MatchesOracleOnInstance) {
  const auto data = Instance();
  std::mt19937_64 rng(7);
  std::vector<V> ces;
  for (int i = 0; i < 5; ++i) ces.push_back(RandomVector(rng, 6));
  models::ThirdPartyJury jury;
  const std::vector<double> weights = {0.7, 0.6, 0.8};
  for (int m = 0; m < 3; ++m) {
    jury.members.push_back(
        {"m", std::make_shared<testing::FunctionModel>(
                  [m](std::span<const double> r) { return r[m] > 0.5 ? 1.0 : 0.0; }),
         weights[m]});
  }
  double num = 0.0, den = 0.0;
  for (int m = 0; m < 3; ++m) {
    double positives = 0;
    for (const auto& ce : ces) positives += ce[m] > 0.5;
    const double recall = positives / ces.size();
    const double precision = positives > 0 ? 1.0 : 0.0;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    num += weights[m] * f1;
    den += weights[m];
  }
  EXPECT_NEAR(*DataFidelity(ces, jury), num / den, 1e-12);
}

TEST(WeightedFidelity, Errors) {
  EXPECT_FALSE(WeightedFidelity(std::vector<double>{}, std::vector<double>{}).ok());
  EXPECT_FALSE(WeightedFidelity(std::vector<double>{0.5}, std::vector<double>{1, 0}).ok());
  EXPECT_FALSE(WeightedFidelity(std::vector<double>{0, 0}, std::vector<double>{1, 0}).ok());
}

TEST(Centrality, CentroidIsExactlyOne) {
  const auto data = Instance();
  const auto centroid = engine::Centroid(data);
  ASSERT_TRUE(centroid.ok());
  EXPECT_EQ(*Centrality(*centroid, data, 5), 1.0);
}

TEST(Centrality, CoincidingNeighborIsError) {
  const auto data = Instance();
  // Row 1 is a target row; with n = all target rows it is always a neighbor.
  EXPECT_FALSE(Centrality(data.rows[1], data, 10).ok());
  EXPECT_FALSE(Centrality(data.rows[1], data, 11).ok());
}

TEST(Centrality, MatchesOracleOnInstance) {
  const auto data = Instance();
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const V ce = RandomVector(rng, 6);
    EXPECT_NEAR(*Centrality(ce, data, 5), OracleCentrality(ce, data, 5), 1e-12);
  }
}

TEST(MeanCentrality, SkipsCoincidingNeighbors) {
  const auto data = Instance();
  std::mt19937_64 rng(10);
  const V a = RandomVector(rng, 6);
  const V b = RandomVector(rng, 6);
  EXPECT_NEAR(*MeanCentrality(std::vector<V>{a, b}, data, 5),
              (OracleCentrality(a, data, 5) + OracleCentrality(b, data, 5)) / 2, 1e-12);
  // A single-target dataset whose only neighbor coincides with the CE.
  const auto lone = MakeEncoded({{0.2, 0.3}, {0.9, 0.9}}, {1, 0});
  EXPECT_TRUE(std::isnan(*MeanCentrality(std::vector<V>{{0.2, 0.3}}, lone, 1)));
}

TEST(ProximitySparsity, MatchOracleOnInstance) {
  const auto data = Instance();
  std::mt19937_64 rng(11);
  const V query = data.rows[0];
  std::vector<V> ces;
  for (int i = 0; i < 5; ++i) {
    V ce = data.rows[1 + 2 * i];
    for (int f = 0; f < 6; f += 1 + i) ce[f] = query[f];
    ces.push_back(ce);
  }
  double distance = 0.0, diffs = 0.0;
  for (const auto& ce : ces) {
    distance += testing::RefEuclid(ce, query);
    diffs += testing::RefDiffs(ce, query);
  }
  EXPECT_NEAR(*Proximity(ces, query), distance / 5, 1e-12);
  EXPECT_NEAR(*Sparsity(ces, query), diffs / 5, 1e-12);
}

TEST(ReliabilityComposite, Examples) {
  EXPECT_EQ(*ReliabilityComposite(1, 1), 1.0);
  EXPECT_NEAR(*ReliabilityComposite(0.9, 1), 0.925, 1e-15);
  EXPECT_EQ(*ReliabilityComposite(0, 0), 0.0);
  EXPECT_FALSE(ReliabilityComposite(1.2, 0).ok());
}

}  // namespace
}  // namespace prefcf::metrics
