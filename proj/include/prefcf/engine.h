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

#ifndef PREFCF_ENGINE_H_
#define PREFCF_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "prefcf/models.h"
#include "prefcf/scoring.h"
#include "prefcf/tabular.h"

namespace prefcf::engine {

// User preference profiles. Each one fixes how prototypes are ranked and
// which rule scores feature-value paths:
//   a: fewest differing features, fcs
//   b: nearest to the query, ncs
//   c: highest target probability under the validation model, rss
//   d: highest cosine similarity to the query, rss
//   e: nearest to the target-class centroid, rss
enum class Preference { kA, kB, kC, kD, kE };

enum class PrototypeRule {
  kFewestDiffs,
  kNearest,
  kMaxProbability,
  kMaxCosine,
  kNearestCentroid,
};

struct PreferencePlan {
  PrototypeRule prototype_rule;
  scoring::ScoreKind score;
};

PreferencePlan PlanFor(Preference preference);
char PreferenceTag(Preference preference);
absl::StatusOr<Preference> ParsePreference(std::string_view tag);
std::vector<Preference> AllPreferences();

struct GenerationConfig {
  Preference preference = Preference::kC;
  // Feature-group length, 3 to 9.
  int depth = 3;
  int num_ces = 5;
  scoring::Distance distance = scoring::Distance::kEuclidean;
  scoring::FcsVariant fcs_variant = scoring::FcsVariant::kSparsityCorrected;
  // Spliced paths tried per prototype before giving up on it.
  int candidate_budget = 64;

  absl::Status Validate() const;
  scoring::ScoreRule Rule() const;
};

// Bit per feature: 0 takes the prototype value, 1 the query value.
struct PathMask {
  std::vector<uint8_t> bits;

  size_t size() const { return bits.size(); }
  int ones() const;
  // "<1,0,1>".
  std::string ToString() const;
  bool operator==(const PathMask&) const = default;
};

struct CandidateCE {
  tabular::EncodedVector vector;
  PathMask path;
  size_t prototype_row = 0;
  // Sum of the per-group scores of `path`.
  double score = 0.0;
  bool validated = false;
  // Set when no path within the budget validated and the prototype itself was
  // emitted (with immutable features kept from the query).
  bool fallback = false;
  // Position of `path` in the descending-score order; 0 is the greedy path.
  int candidate_rank = 0;
};

struct FeatureGroup {
  size_t begin = 0;
  size_t size = 0;
};

// Ranks target-class rows for `query` under the preference's prototype rule
// and returns the best `count` row indices. Rows that differ from the query
// on an immutable feature rank after all conforming rows. Ties keep row order.
absl::StatusOr<std::vector<size_t>> SelectPrototypes(
    const tabular::EncodedData& data, std::span<const double> query,
    Preference preference, const models::ClassifierModel& model, size_t count,
    scoring::Distance distance = scoring::Distance::kEuclidean);

// Componentwise mean of the target-class rows.
absl::StatusOr<std::vector<double>> Centroid(const tabular::EncodedData& data);

// Contiguous groups of `depth` features in schema order; the last group holds
// the remainder.
absl::StatusOr<std::vector<FeatureGroup>> PartitionFeatures(size_t num_features,
                                                            int depth);

// All 2^length masks in ascending binary order, first feature as the most
// significant bit.
absl::StatusOr<std::vector<PathMask>> EnumerateLocalPaths(int length);

struct ScoredPath {
  PathMask path;
  double score = 0.0;
};

// Scores every admissible local path (bit 1 on each immutable position) and
// returns them best first. Ties prefer more query-side bits, then ascending
// binary order. With kError, a zero-norm prototype slice is an error and
// zero-norm candidates are skipped.
absl::StatusOr<std::vector<ScoredPath>> RankLocalPaths(
    std::span<const double> prototype, std::span<const double> query,
    const scoring::ScoreRule& rule, const std::vector<bool>& immutable,
    scoring::ZeroNormPolicy zero_norm = scoring::ZeroNormPolicy::kError);

absl::StatusOr<PathMask> SelectLocalPath(std::span<const double> prototype,
                                         std::span<const double> query,
                                         const scoring::ScoreRule& rule,
                                         const std::vector<bool>& immutable);

absl::StatusOr<PathMask> SplicePaths(std::span<const PathMask> local_paths);
// Also checks each local path against its group size.
absl::StatusOr<PathMask> SplicePaths(std::span<const PathMask> local_paths,
                                     std::span<const FeatureGroup> groups);

absl::StatusOr<std::vector<double>> FillCe(std::span<const double> prototype,
                                           std::span<const double> query,
                                           const PathMask& path);

struct Generation {
  std::vector<CandidateCE> ces;
  std::vector<std::string> warnings;
};

// Builds up to config.num_ces distinct counterfactuals, one per prototype in
// rank order. Per prototype: split features into groups, rank each group's
// local paths, splice the best ones, fill and validate. If the spliced path
// does not validate, the next-best spliced paths by total score are tried up
// to the candidate budget, then the prototype itself is emitted as a fallback.
absl::StatusOr<Generation> Generate(const tabular::EncodedData& data,
                                    std::span<const double> query,
                                    const GenerationConfig& config,
                                    const models::ClassifierModel& validation_model);

}  // namespace prefcf::engine

#endif  // PREFCF_ENGINE_H_
