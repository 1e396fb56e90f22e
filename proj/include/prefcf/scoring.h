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

#ifndef PREFCF_SCORING_H_
#define PREFCF_SCORING_H_

#include <span>
#include <string_view>

#include "absl/status/statusor.h"

namespace prefcf::scoring {

enum class Distance { kEuclidean, kManhattan };

// Path-scoring rules. fcs favours few changed features, ncs nearness to the
// query, rss similarity to the prototype relative to the cost of moving.
enum class ScoreKind { kFcs, kNcs, kRss };

// kLiteral multiplies similarity by the number of changed features;
// kSparsityCorrected multiplies by the number of unchanged ones, so that
// maximizing the score favours sparse candidates.
enum class FcsVariant { kLiteral, kSparsityCorrected };

struct ScoreRule {
  ScoreKind kind = ScoreKind::kRss;
  Distance distance = Distance::kEuclidean;
  FcsVariant fcs_variant = FcsVariant::kSparsityCorrected;
};

// What Score does when a cosine operand has zero norm: fail, or treat the
// similarity as 0.
enum class ZeroNormPolicy { kError, kNeutral };

std::string_view DistanceName(Distance distance);
absl::StatusOr<Distance> ParseDistance(std::string_view name);
std::string_view ScoreKindName(ScoreKind kind);
std::string_view FcsVariantName(FcsVariant variant);
absl::StatusOr<FcsVariant> ParseFcsVariant(std::string_view name);

// Standard logistic function.
double Sigmoid(double z);

absl::StatusOr<double> ComputeDistance(std::span<const double> a,
                                       std::span<const double> b,
                                       Distance distance);

// Errors on length mismatch or a zero-norm operand.
absl::StatusOr<double> Cosine(std::span<const double> a, std::span<const double> b);

// Number of components that differ, compared exactly.
absl::StatusOr<int> CountDiffs(std::span<const double> a, std::span<const double> b);

absl::StatusOr<double> Fcs(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, FcsVariant variant);

// sigmoid(cos(candidate, prototype)) / exp(d(candidate, query)).
absl::StatusOr<double> Ncs(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, Distance distance);

// exp(cos(candidate, prototype)) / sigmoid(d(candidate, query)).
absl::StatusOr<double> Rss(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, Distance distance);

absl::StatusOr<double> Score(const ScoreRule& rule,
                             std::span<const double> candidate,
                             std::span<const double> prototype,
                             std::span<const double> query,
                             ZeroNormPolicy zero_norm = ZeroNormPolicy::kError);

}  // namespace prefcf::scoring

#endif  // PREFCF_SCORING_H_
