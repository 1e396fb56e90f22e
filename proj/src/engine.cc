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

#include "prefcf/engine.h"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "prefcf/status_macros.h"

namespace prefcf::engine {
namespace {

using scoring::ZeroNormPolicy;

constexpr int kMaxLocalPathLength = 9;

double Norm2(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return sum;
}

// Cosine that reads a zero-norm operand as no similarity.
double LenientCosine(std::span<const double> a, std::span<const double> b) {
  auto cosine = scoring::Cosine(a, b);
  return cosine.ok() ? *cosine : 0.0;
}

PathMask MaskFromIndex(uint32_t index, int length) {
  PathMask mask;
  mask.bits.resize(length);
  for (int p = 0; p < length; ++p) {
    mask.bits[p] = static_cast<uint8_t>((index >> (length - 1 - p)) & 1u);
  }
  return mask;
}

// Best-first enumeration of group-path combinations by total score.
class CombinationQueue {
 public:
  explicit CombinationQueue(const std::vector<std::vector<ScoredPath>>& ranked)
      : ranked_(ranked) {
    Push(std::vector<int>(ranked.size(), 0));
  }

  bool Next(std::vector<int>& out, double& total) {
    if (queue_.empty()) return false;
    Entry entry = queue_.top();
    queue_.pop();
    for (size_t g = 0; g < entry.indices.size(); ++g) {
      if (entry.indices[g] + 1 < static_cast<int>(ranked_[g].size())) {
        std::vector<int> next = entry.indices;
        ++next[g];
        Push(std::move(next));
      }
    }
    total = entry.total;
    out = std::move(entry.indices);
    return true;
  }

 private:
  struct Entry {
    double total;
    std::vector<int> indices;
  };
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.total != b.total) return a.total < b.total;
      return a.indices > b.indices;
    }
  };

  void Push(std::vector<int> indices) {
    if (!seen_.insert(indices).second) return;
    double total = 0.0;
    for (size_t g = 0; g < indices.size(); ++g) total += ranked_[g][indices[g]].score;
    queue_.push(Entry{total, std::move(indices)});
  }

  const std::vector<std::vector<ScoredPath>>& ranked_;
  std::priority_queue<Entry, std::vector<Entry>, Worse> queue_;
  std::set<std::vector<int>> seen_;
};

}  // namespace

PreferencePlan PlanFor(Preference preference) {
  switch (preference) {
    case Preference::kA:
      return {PrototypeRule::kFewestDiffs, scoring::ScoreKind::kFcs};
    case Preference::kB:
      return {PrototypeRule::kNearest, scoring::ScoreKind::kNcs};
    case Preference::kC:
      return {PrototypeRule::kMaxProbability, scoring::ScoreKind::kRss};
    case Preference::kD:
      return {PrototypeRule::kMaxCosine, scoring::ScoreKind::kRss};
    case Preference::kE:
      return {PrototypeRule::kNearestCentroid, scoring::ScoreKind::kRss};
  }
  return {PrototypeRule::kMaxProbability, scoring::ScoreKind::kRss};
}

char PreferenceTag(Preference preference) {
  return static_cast<char>('a' + static_cast<int>(preference));
}

absl::StatusOr<Preference> ParsePreference(std::string_view tag) {
  if (tag.size() == 1 && tag[0] >= 'a' && tag[0] <= 'e') {
    return static_cast<Preference>(tag[0] - 'a');
  }
  return absl::InvalidArgumentError(
      absl::StrCat("Unknown preference \"", std::string(tag), "\"; expected a, b, c, d or e"));
}

std::vector<Preference> AllPreferences() {
  return {Preference::kA, Preference::kB, Preference::kC, Preference::kD,
          Preference::kE};
}

absl::Status GenerationConfig::Validate() const {
  if (depth < 3 || depth > 9) {
    return absl::InvalidArgumentError(
        absl::StrCat("Group depth must lie in [3, 9], got ", depth));
  }
  if (num_ces < 1) return absl::InvalidArgumentError("num_ces must be positive");
  if (candidate_budget < 1) {
    return absl::InvalidArgumentError("candidate_budget must be positive");
  }
  return absl::OkStatus();
}

scoring::ScoreRule GenerationConfig::Rule() const {
  return {PlanFor(preference).score, distance, fcs_variant};
}

int PathMask::ones() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), 1));
}

std::string PathMask::ToString() const {
  return absl::StrCat("<", absl::StrJoin(bits, ",", [](std::string* out, uint8_t bit) {
                        absl::StrAppend(out, static_cast<int>(bit));
                      }),
                      ">");
}

absl::StatusOr<std::vector<size_t>> SelectPrototypes(
    const tabular::EncodedData& data, std::span<const double> query,
    Preference preference, const models::ClassifierModel& model, size_t count,
    scoring::Distance distance) {
  if (query.size() != data.num_features()) {
    return absl::InvalidArgumentError("Query length differs from the schema");
  }
  const std::vector<size_t> targets = data.TargetRows();
  if (targets.empty()) {
    return absl::FailedPreconditionError("Dataset has no target-class rows");
  }
  if (count > targets.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Requested ", count, " prototypes but only ", targets.size(),
        " target-class rows exist"));
  }

  std::vector<double> centroid;
  if (preference == Preference::kE) {
    ASSIGN_OR_RETURN(centroid, Centroid(data));
  }
  // (immutable conflict, key, row); ascending order is best first.
  std::vector<std::tuple<bool, double, size_t>> ranked;
  ranked.reserve(targets.size());
  for (const size_t r : targets) {
    const auto& row = data.rows[r];
    bool conflict = false;
    for (size_t f = 0; f < row.size(); ++f) {
      if (data.immutable[f] && row[f] != query[f]) conflict = true;
    }
    double key = 0.0;
    switch (PlanFor(preference).prototype_rule) {
      case PrototypeRule::kFewestDiffs: {
        ASSIGN_OR_RETURN(const int diffs, scoring::CountDiffs(row, query));
        key = diffs;
        break;
      }
      case PrototypeRule::kNearest: {
        ASSIGN_OR_RETURN(key, scoring::ComputeDistance(row, query, distance));
        break;
      }
      case PrototypeRule::kMaxProbability:
        key = -model.PredictProba(row);
        break;
      case PrototypeRule::kMaxCosine:
        key = -LenientCosine(row, query);
        break;
      case PrototypeRule::kNearestCentroid: {
        ASSIGN_OR_RETURN(key, scoring::ComputeDistance(row, centroid, distance));
        break;
      }
    }
    ranked.emplace_back(conflict, key, r);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<size_t> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(std::get<2>(ranked[i]));
  return out;
}

absl::StatusOr<std::vector<double>> Centroid(const tabular::EncodedData& data) {
  const std::vector<size_t> targets = data.TargetRows();
  if (targets.empty()) {
    return absl::FailedPreconditionError("Centroid needs at least one target-class row");
  }
  std::vector<double> centroid(data.num_features(), 0.0);
  for (const size_t r : targets) {
    for (size_t f = 0; f < centroid.size(); ++f) centroid[f] += data.rows[r][f];
  }
  for (double& value : centroid) value /= static_cast<double>(targets.size());
  return centroid;
}

absl::StatusOr<std::vector<FeatureGroup>> PartitionFeatures(size_t num_features,
                                                            int depth) {
  if (depth < 3 || depth > 9) {
    return absl::InvalidArgumentError(
        absl::StrCat("Group depth must lie in [3, 9], got ", depth));
  }
  if (num_features < 1) return absl::InvalidArgumentError("No features to partition");
  std::vector<FeatureGroup> groups;
  for (size_t begin = 0; begin < num_features; begin += depth) {
    groups.push_back({begin, std::min<size_t>(depth, num_features - begin)});
  }
  return groups;
}

absl::StatusOr<std::vector<PathMask>> EnumerateLocalPaths(int length) {
  if (length < 1 || length > kMaxLocalPathLength) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Local path length must lie in [1, ", kMaxLocalPathLength, "], got ", length));
  }
  std::vector<PathMask> paths;
  paths.reserve(size_t{1} << length);
  for (uint32_t index = 0; index < (1u << length); ++index) {
    paths.push_back(MaskFromIndex(index, length));
  }
  return paths;
}

absl::StatusOr<std::vector<ScoredPath>> RankLocalPaths(
    std::span<const double> prototype, std::span<const double> query,
    const scoring::ScoreRule& rule, const std::vector<bool>& immutable,
    ZeroNormPolicy zero_norm) {
  if (prototype.size() != query.size() || immutable.size() != query.size()) {
    return absl::InvalidArgumentError("Slice lengths differ");
  }
  const int length = static_cast<int>(query.size());
  if (length < 1 || length > kMaxLocalPathLength) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Local path length must lie in [1, ", kMaxLocalPathLength, "], got ", length));
  }
  if (zero_norm == ZeroNormPolicy::kError && Norm2(prototype) == 0.0) {
    return absl::InvalidArgumentError("Prototype slice has zero norm");
  }

  struct Scored {
    double score;
    int ones;
    uint32_t index;
  };
  std::vector<Scored> scored;
  std::vector<double> candidate(length);
  for (uint32_t index = 0; index < (1u << length); ++index) {
    bool admissible = true;
    int ones = 0;
    for (int p = 0; p < length; ++p) {
      const bool from_query = (index >> (length - 1 - p)) & 1u;
      if (immutable[p] && !from_query) admissible = false;
      ones += from_query ? 1 : 0;
      candidate[p] = from_query ? query[p] : prototype[p];
    }
    if (!admissible) continue;
    if (zero_norm == ZeroNormPolicy::kError && Norm2(candidate) == 0.0) continue;
    ASSIGN_OR_RETURN(const double score,
                     scoring::Score(rule, candidate, prototype, query, zero_norm));
    scored.push_back({score, ones, index});
  }
  if (scored.empty()) {
    return absl::InvalidArgumentError("No admissible local path could be scored");
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ones != b.ones) return a.ones > b.ones;
    return a.index < b.index;
  });
  std::vector<ScoredPath> out;
  out.reserve(scored.size());
  for (const Scored& s : scored) out.push_back({MaskFromIndex(s.index, length), s.score});
  return out;
}

absl::StatusOr<PathMask> SelectLocalPath(std::span<const double> prototype,
                                         std::span<const double> query,
                                         const scoring::ScoreRule& rule,
                                         const std::vector<bool>& immutable) {
  ASSIGN_OR_RETURN(auto ranked, RankLocalPaths(prototype, query, rule, immutable));
  return std::move(ranked.front().path);
}

absl::StatusOr<PathMask> SplicePaths(std::span<const PathMask> local_paths) {
  PathMask out;
  for (const PathMask& local : local_paths) {
    out.bits.insert(out.bits.end(), local.bits.begin(), local.bits.end());
  }
  return out;
}

absl::StatusOr<PathMask> SplicePaths(std::span<const PathMask> local_paths,
                                     std::span<const FeatureGroup> groups) {
  if (local_paths.size() != groups.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Got ", local_paths.size(), " local paths for ", groups.size(), " groups"));
  }
  for (size_t g = 0; g < groups.size(); ++g) {
    if (local_paths[g].size() != groups[g].size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Local path ", g, " has length ", local_paths[g].size(),
          ", its group has ", groups[g].size, " features"));
    }
  }
  return SplicePaths(local_paths);
}

absl::StatusOr<std::vector<double>> FillCe(std::span<const double> prototype,
                                           std::span<const double> query,
                                           const PathMask& path) {
  if (prototype.size() != query.size() || path.size() != query.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Cannot fill: prototype ", prototype.size(), ", query ", query.size(),
        ", path ", path.size()));
  }
  std::vector<double> out(query.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = path.bits[i] == 0 ? prototype[i] : query[i];
  }
  return out;
}

absl::StatusOr<Generation> Generate(const tabular::EncodedData& data,
                                    std::span<const double> query,
                                    const GenerationConfig& config,
                                    const models::ClassifierModel& validation_model) {
  RETURN_IF_ERROR(config.Validate());
  const size_t num_features = data.num_features();
  if (query.size() != num_features) {
    return absl::InvalidArgumentError("Query length differs from the schema");
  }
  Generation generation;
  if (validation_model.Predict(query) == 1) {
    generation.warnings.push_back(
        "Query is already classified as the target class");
  }
  const size_t num_targets = data.TargetRows().size();
  if (num_targets == 0) {
    return absl::FailedPreconditionError("Dataset has no target-class rows");
  }
  ASSIGN_OR_RETURN(const std::vector<size_t> prototypes,
                   SelectPrototypes(data, query, config.preference, validation_model,
                                    num_targets, config.distance));
  ASSIGN_OR_RETURN(const std::vector<FeatureGroup> groups,
                   PartitionFeatures(num_features, config.depth));
  const scoring::ScoreRule rule = config.Rule();

  std::vector<std::vector<bool>> immutable_slices;
  for (const FeatureGroup& group : groups) {
    immutable_slices.emplace_back(data.immutable.begin() + group.begin,
                                  data.immutable.begin() + group.begin + group.size);
  }

  for (const size_t prototype_row : prototypes) {
    if (generation.ces.size() >= static_cast<size_t>(config.num_ces)) break;
    const std::vector<double>& prototype = data.rows[prototype_row];

    std::vector<std::vector<ScoredPath>> ranked;
    ranked.reserve(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) {
      const auto slice = [&](std::span<const double> v) {
        return v.subspan(groups[g].begin, groups[g].size);
      };
      ASSIGN_OR_RETURN(auto group_paths,
                       RankLocalPaths(slice(prototype), slice(query), rule,
                                      immutable_slices[g], ZeroNormPolicy::kNeutral));
      ranked.push_back(std::move(group_paths));
    }

    CandidateCE ce;
    ce.prototype_row = prototype_row;
    bool found = false;
    CombinationQueue combinations(ranked);
    std::vector<int> indices;
    double total = 0.0;
    for (int rank = 0; rank < config.candidate_budget && combinations.Next(indices, total);
         ++rank) {
      std::vector<PathMask> local_paths;
      local_paths.reserve(groups.size());
      for (size_t g = 0; g < groups.size(); ++g) {
        local_paths.push_back(ranked[g][indices[g]].path);
      }
      ASSIGN_OR_RETURN(PathMask path, SplicePaths(local_paths, groups));
      ASSIGN_OR_RETURN(std::vector<double> vector, FillCe(prototype, query, path));
      if (validation_model.Predict(vector) == 1) {
        ce.vector = {std::move(vector), tabular::Provenance::kCe};
        ce.path = std::move(path);
        ce.score = total;
        ce.validated = true;
        ce.candidate_rank = rank;
        found = true;
        break;
      }
    }
    if (!found) {
      PathMask path;
      path.bits.resize(num_features);
      for (size_t f = 0; f < num_features; ++f) path.bits[f] = data.immutable[f] ? 1 : 0;
      ASSIGN_OR_RETURN(std::vector<double> vector, FillCe(prototype, query, path));
      double score = 0.0;
      for (const FeatureGroup& group : groups) {
        const std::span<const double> candidate(vector);
        ASSIGN_OR_RETURN(const double group_score,
                         scoring::Score(rule, candidate.subspan(group.begin, group.size),
                                        std::span(prototype).subspan(group.begin, group.size),
                                        query.subspan(group.begin, group.size),
                                        ZeroNormPolicy::kNeutral));
        score += group_score;
      }
      ce.validated = validation_model.Predict(vector) == 1;
      ce.vector = {std::move(vector), tabular::Provenance::kCe};
      ce.path = std::move(path);
      ce.score = score;
      ce.fallback = true;
      ce.candidate_rank = config.candidate_budget;
    }

    const bool duplicate = std::any_of(
        generation.ces.begin(), generation.ces.end(),
        [&](const CandidateCE& other) { return other.vector.values == ce.vector.values; });
    if (!duplicate) generation.ces.push_back(std::move(ce));
  }
  return generation;
}

}  // namespace prefcf::engine
