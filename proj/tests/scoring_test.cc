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

#include "prefcf/scoring.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.h"

namespace prefcf::scoring {
namespace {

using V = std::vector<double>;

const V kPrototype = {0.6, 0.89, 0.49};
const V kQuery = {0.8, 0.45, 0.87};

struct GoldRow {
  V candidate;
  double similarity;
  double cost;
  double rss;
};

// Local rss of the eight paths between kPrototype and kQuery.
const std::vector<GoldRow> kGold = {
    {{0.6, 0.89, 0.49}, 1.0, 0.6148, 4.1882},    {{0.6, 0.89, 0.87}, 0.9682, 0.4833, 4.2572},
    {{0.6, 0.45, 0.49}, 0.9466, 0.4294, 4.2542}, {{0.6, 0.45, 0.87}, 0.8757, 0.2, 4.3658},
    {{0.8, 0.89, 0.49}, 0.9911, 0.5814, 4.2006}, {{0.8, 0.89, 0.87}, 0.9729, 0.44, 4.3495},
    {{0.8, 0.45, 0.49}, 0.9128, 0.38, 4.1949},   {{0.8, 0.45, 0.87}, 0.8757, 0.0, 4.8013},
};

TEST(Scoring, GoldPathTable) {
  for (const auto& row : kGold) {
    EXPECT_NEAR(*Cosine(row.candidate, kPrototype), row.similarity, 1e-3);
    EXPECT_NEAR(*ComputeDistance(row.candidate, kQuery, Distance::kEuclidean), row.cost, 1e-3);
    EXPECT_NEAR(*Rss(row.candidate, kPrototype, kQuery, Distance::kEuclidean), row.rss, 1e-3);
  }
}

TEST(Cosine, Examples) {
  EXPECT_NEAR(*Cosine(V{0.3, 0.7, 0.1}, V{0.3, 0.7, 0.1}), 1.0, 1e-15);
  EXPECT_NEAR(*Cosine(kQuery, kPrototype), 0.8757, 1e-4);
  EXPECT_EQ(*Cosine(V{1, 0}, V{0, 1}), 0.0);
}

TEST(Cosine, ZeroNormAndLengthErrors) {
  EXPECT_FALSE(Cosine(V{0, 0}, V{1, 0}).ok());
  EXPECT_FALSE(Cosine(V{1, 0}, V{1, 0, 0}).ok());
}

TEST(Distance, EuclideanAndManhattan) {
  EXPECT_NEAR(*ComputeDistance(kPrototype, kQuery, Distance::kEuclidean), 0.6148, 1e-4);
  EXPECT_NEAR(*ComputeDistance(kPrototype, kQuery, Distance::kManhattan), 0.2 + 0.44 + 0.38,
              1e-12);
  EXPECT_EQ(*ParseDistance("manhattan"), Distance::kManhattan);
  EXPECT_FALSE(ParseDistance("chebyshev").ok());
}

TEST(CountDiffs, Examples) {
  EXPECT_EQ(*CountDiffs(kQuery, kQuery), 0);
  EXPECT_EQ(*CountDiffs(kPrototype, kQuery), 3);
  EXPECT_EQ(*CountDiffs(V{0.6, 0.45, 0.87}, kQuery), 1);
}

TEST(Fcs, LiteralExamples) {
  EXPECT_EQ(*Fcs(kQuery, kPrototype, kQuery, FcsVariant::kLiteral), 0.0);
  EXPECT_NEAR(*Fcs(kPrototype, kPrototype, kQuery, FcsVariant::kLiteral), 2.1931757, 1e-6);
  EXPECT_NEAR(*Fcs(V{0.6, 0.45, 0.87}, kPrototype, kQuery, FcsVariant::kLiteral), 0.7059,
              1e-4);
}

TEST(Fcs, SparsityCorrectedCountsKeptFeatures) {
  // All three kept from the query.
  EXPECT_NEAR(*Fcs(kQuery, kPrototype, kQuery, FcsVariant::kSparsityCorrected),
              testing::RefSigmoid(testing::RefCosine(kQuery, kPrototype)) * 3, 1e-12);
  EXPECT_NEAR(*Fcs(kPrototype, kPrototype, kQuery, FcsVariant::kSparsityCorrected), 0.0,
              1e-15);
}

TEST(Ncs, Examples) {
  EXPECT_NEAR(*Ncs(kQuery, kQuery, kQuery, Distance::kEuclidean), 0.731058, 1e-6);
  EXPECT_NEAR(*Ncs(kQuery, kPrototype, kQuery, Distance::kEuclidean), 0.7060, 1e-4);
}

TEST(Ncs, DecreasesWithDistanceAtFixedSimilarity) {
  // Candidates are positive multiples of the prototype, so cosine stays 1.
  const V prototype = {1.0, 0.0};
  const V query = {0.0, 0.0};
  const double near = *Ncs(V{0.5, 0.0}, prototype, query, Distance::kEuclidean);
  const double far = *Ncs(V{1.0, 0.0}, prototype, query, Distance::kEuclidean);
  EXPECT_NEAR(far / near, std::exp(-0.5), 1e-12);
}

TEST(Score, DispatchesOnRule) {
  const V candidate = {0.6, 0.45, 0.87};
  EXPECT_EQ(*Score({ScoreKind::kRss, Distance::kEuclidean, FcsVariant::kSparsityCorrected},
                   candidate, kPrototype, kQuery),
            *Rss(candidate, kPrototype, kQuery, Distance::kEuclidean));
  EXPECT_EQ(*Score({ScoreKind::kNcs, Distance::kManhattan, FcsVariant::kSparsityCorrected},
                   candidate, kPrototype, kQuery),
            *Ncs(candidate, kPrototype, kQuery, Distance::kManhattan));
  EXPECT_EQ(*Score({ScoreKind::kFcs, Distance::kEuclidean, FcsVariant::kLiteral}, candidate,
                   kPrototype, kQuery),
            *Fcs(candidate, kPrototype, kQuery, FcsVariant::kLiteral));
}

TEST(Score, ZeroNormPolicy) {
  const V zero = {0.0, 0.0};
  const V query = {0.5, 0.5};
  const ScoreRule rule{ScoreKind::kRss, Distance::kEuclidean, FcsVariant::kSparsityCorrected};
  EXPECT_FALSE(Score(rule, zero, query, query).ok());
  auto neutral = Score(rule, zero, query, query, ZeroNormPolicy::kNeutral);
  ASSERT_TRUE(neutral.ok());
  EXPECT_NEAR(*neutral, 1.0 / testing::RefSigmoid(testing::RefEuclid(zero, query)), 1e-12);
}

TEST(Score, RandomAgreementWithReferenceFormulas) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 1 + trial % 9;
    const auto c = testing::RandomVector(rng, n, 0.01, 1.0);
    const auto p = testing::RandomVector(rng, n, 0.01, 1.0);
    const auto q = testing::RandomVector(rng, n, 0.01, 1.0);
    const double cos = testing::RefCosine(c, p);
    const double d = testing::RefEuclid(c, q);
    const double m = testing::RefManhattan(c, q);
    EXPECT_NEAR(*Rss(c, p, q, Distance::kEuclidean),
                std::exp(cos) / testing::RefSigmoid(d), 1e-12);
    EXPECT_NEAR(*Ncs(c, p, q, Distance::kManhattan),
                testing::RefSigmoid(cos) / std::exp(m), 1e-12);
    EXPECT_NEAR(*Fcs(c, p, q, FcsVariant::kLiteral),
                testing::RefSigmoid(cos) * testing::RefDiffs(c, q), 1e-12);
    EXPECT_NEAR(*Fcs(c, p, q, FcsVariant::kSparsityCorrected),
                testing::RefSigmoid(cos) * (n - testing::RefDiffs(c, q)), 1e-12);
  }
}

}  // namespace
}  // namespace prefcf::scoring
