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

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "prefcf/status_macros.h"

namespace prefcf::scoring {
namespace {

absl::Status CheckLengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Vector lengths differ: ", a.size(), " vs ", b.size()));
  }
  return absl::OkStatus();
}

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

absl::StatusOr<double> Similarity(std::span<const double> candidate,
                                  std::span<const double> prototype,
                                  ZeroNormPolicy zero_norm) {
  if (zero_norm == ZeroNormPolicy::kNeutral) {
    RETURN_IF_ERROR(CheckLengths(candidate, prototype));
    if (Norm(candidate) == 0.0 || Norm(prototype) == 0.0) return 0.0;
  }
  return Cosine(candidate, prototype);
}

}  // namespace

std::string_view DistanceName(Distance distance) {
  return distance == Distance::kEuclidean ? "euclidean" : "manhattan";
}

absl::StatusOr<Distance> ParseDistance(std::string_view name) {
  if (name == "euclidean") return Distance::kEuclidean;
  if (name == "manhattan") return Distance::kManhattan;
  return absl::InvalidArgumentError(absl::StrCat("Unknown distance \"", std::string(name), "\""));
}

std::string_view ScoreKindName(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kFcs:
      return "fcs";
    case ScoreKind::kNcs:
      return "ncs";
    case ScoreKind::kRss:
      return "rss";
  }
  return "unknown";
}

std::string_view FcsVariantName(FcsVariant variant) {
  return variant == FcsVariant::kLiteral ? "literal" : "sparsity_corrected";
}

absl::StatusOr<FcsVariant> ParseFcsVariant(std::string_view name) {
  if (name == "literal") return FcsVariant::kLiteral;
  if (name == "sparsity_corrected") return FcsVariant::kSparsityCorrected;
  return absl::InvalidArgumentError(absl::StrCat("Unknown fcs variant \"", std::string(name), "\""));
}

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

absl::StatusOr<double> ComputeDistance(std::span<const double> a,
                                       std::span<const double> b,
                                       Distance distance) {
  RETURN_IF_ERROR(CheckLengths(a, b));
  double sum = 0.0;
  if (distance == Distance::kEuclidean) {
    for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
  }
  for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

absl::StatusOr<double> Cosine(std::span<const double> a, std::span<const double> b) {
  RETURN_IF_ERROR(CheckLengths(a, b));
  const double norm_a = Norm(a);
  const double norm_b = Norm(b);
  if (norm_a == 0.0 || norm_b == 0.0) {
    return absl::InvalidArgumentError("Cosine similarity of a zero-norm vector");
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (norm_a * norm_b);
}

absl::StatusOr<int> CountDiffs(std::span<const double> a, std::span<const double> b) {
  RETURN_IF_ERROR(CheckLengths(a, b));
  int count = 0;
  for (size_t i = 0; i < a.size(); ++i) count += a[i] != b[i] ? 1 : 0;
  return count;
}

absl::StatusOr<double> Fcs(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, FcsVariant variant) {
  return Score({ScoreKind::kFcs, Distance::kEuclidean, variant}, candidate,
               prototype, query);
}

absl::StatusOr<double> Ncs(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, Distance distance) {
  return Score({ScoreKind::kNcs, distance, FcsVariant::kSparsityCorrected},
               candidate, prototype, query);
}

absl::StatusOr<double> Rss(std::span<const double> candidate,
                           std::span<const double> prototype,
                           std::span<const double> query, Distance distance) {
  return Score({ScoreKind::kRss, distance, FcsVariant::kSparsityCorrected},
               candidate, prototype, query);
}

absl::StatusOr<double> Score(const ScoreRule& rule,
                             std::span<const double> candidate,
                             std::span<const double> prototype,
                             std::span<const double> query,
                             ZeroNormPolicy zero_norm) {
  RETURN_IF_ERROR(CheckLengths(candidate, query));
  ASSIGN_OR_RETURN(const double similarity,
                   Similarity(candidate, prototype, zero_norm));
  switch (rule.kind) {
    case ScoreKind::kFcs: {
      ASSIGN_OR_RETURN(const int diffs, CountDiffs(candidate, query));
      const int factor = rule.fcs_variant == FcsVariant::kLiteral
                             ? diffs
                             : static_cast<int>(candidate.size()) - diffs;
      return Sigmoid(similarity) * factor;
    }
    case ScoreKind::kNcs: {
      ASSIGN_OR_RETURN(const double d, ComputeDistance(candidate, query, rule.distance));
      return Sigmoid(similarity) / std::exp(d);
    }
    case ScoreKind::kRss: {
      ASSIGN_OR_RETURN(const double d, ComputeDistance(candidate, query, rule.distance));
      return std::exp(similarity) / Sigmoid(d);
    }
  }
  return absl::InternalError("Unknown score kind");
}

}  // namespace prefcf::scoring
