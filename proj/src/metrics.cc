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

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "prefcf/status_macros.h"

namespace prefcf::metrics {
namespace {

absl::Status CheckNonEmpty(VectorList ces) {
  if (ces.empty()) return absl::InvalidArgumentError("Empty CE list");
  return absl::OkStatus();
}

// Target rows nearest to the target centroid, with their centroid distance.
absl::StatusOr<std::vector<std::pair<size_t, double>>> CentroidNeighbors(
    const tabular::EncodedData& data, int n_neighbors, scoring::Distance distance,
    std::vector<double>& centroid) {
  const std::vector<size_t> targets = data.TargetRows();
  if (n_neighbors < 1) return absl::InvalidArgumentError("n_neighbors must be positive");
  if (targets.size() < static_cast<size_t>(n_neighbors)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Centrality needs ", n_neighbors, " target-class rows, found ", targets.size()));
  }
  centroid.assign(data.num_features(), 0.0);
  for (const size_t r : targets) {
    for (size_t f = 0; f < centroid.size(); ++f) centroid[f] += data.rows[r][f];
  }
  for (double& v : centroid) v /= static_cast<double>(targets.size());
  std::vector<std::pair<double, size_t>> by_distance;
  for (const size_t r : targets) {
    ASSIGN_OR_RETURN(const double d, scoring::ComputeDistance(data.rows[r], centroid, distance));
    by_distance.emplace_back(d, r);
  }
  std::partial_sort(by_distance.begin(), by_distance.begin() + n_neighbors,
                    by_distance.end());
  std::vector<std::pair<size_t, double>> out;
  for (int i = 0; i < n_neighbors; ++i) {
    out.emplace_back(by_distance[i].second, by_distance[i].first);
  }
  return out;
}

}  // namespace

absl::StatusOr<double> Proximity(VectorList ces, std::span<const double> query,
                                 scoring::Distance distance) {
  RETURN_IF_ERROR(CheckNonEmpty(ces));
  double sum = 0.0;
  for (const auto& ce : ces) {
    ASSIGN_OR_RETURN(const double d, scoring::ComputeDistance(ce, query, distance));
    sum += d;
  }
  return sum / static_cast<double>(ces.size());
}

absl::StatusOr<double> Sparsity(VectorList ces, std::span<const double> query) {
  RETURN_IF_ERROR(CheckNonEmpty(ces));
  double sum = 0.0;
  for (const auto& ce : ces) {
    ASSIGN_OR_RETURN(const int diffs, scoring::CountDiffs(ce, query));
    sum += diffs;
  }
  return sum / static_cast<double>(ces.size());
}

absl::StatusOr<double> Validity(VectorList ces, const models::ClassifierModel& model) {
  RETURN_IF_ERROR(CheckNonEmpty(ces));
  double hits = 0.0;
  for (const auto& ce : ces) hits += model.Predict(ce) == 1 ? 1.0 : 0.0;
  return hits / static_cast<double>(ces.size());
}

absl::StatusOr<double> WeightedFidelity(std::span<const double> weights,
                                        std::span<const double> scores) {
  if (weights.size() != scores.size() || weights.empty()) {
    return absl::InvalidArgumentError("Weights and scores must be non-empty and aligned");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) return absl::InvalidArgumentError("Negative jury weight");
    weighted += weights[i] * scores[i];
    total += weights[i];
  }
  if (total <= 0.0) return absl::InvalidArgumentError("Jury weights sum to zero");
  return weighted / total;
}

absl::StatusOr<double> DataFidelity(VectorList ces, const models::ThirdPartyJury& jury) {
  RETURN_IF_ERROR(CheckNonEmpty(ces));
  const std::vector<int> truth(ces.size(), 1);
  std::vector<double> weights;
  std::vector<double> scores;
  for (const auto& member : jury.members) {
    std::vector<int> predictions;
    predictions.reserve(ces.size());
    for (const auto& ce : ces) predictions.push_back(member.model->Predict(ce));
    weights.push_back(member.weight);
    scores.push_back(models::F1FromPredictions(truth, predictions));
  }
  return WeightedFidelity(weights, scores);
}

absl::StatusOr<double> Centrality(std::span<const double> ce,
                                  const tabular::EncodedData& data, int n_neighbors,
                                  scoring::Distance distance) {
  std::vector<double> centroid;
  ASSIGN_OR_RETURN(const auto neighbors,
                   CentroidNeighbors(data, n_neighbors, distance, centroid));
  double sum = 0.0;
  for (const auto& [row, to_centroid] : neighbors) {
    ASSIGN_OR_RETURN(const double to_ce,
                     scoring::ComputeDistance(data.rows[row], ce, distance));
    if (to_ce == 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "CE coincides with centroid neighbor row ", row, "; centrality is undefined"));
    }
    sum += to_centroid / to_ce;
  }
  return sum / static_cast<double>(neighbors.size());
}

absl::StatusOr<double> MeanCentrality(VectorList ces, const tabular::EncodedData& data,
                                      int n_neighbors, scoring::Distance distance) {
  RETURN_IF_ERROR(CheckNonEmpty(ces));
  std::vector<double> centroid;
  ASSIGN_OR_RETURN(const auto neighbors,
                   CentroidNeighbors(data, n_neighbors, distance, centroid));
  double total = 0.0;
  size_t used = 0;
  for (const auto& ce : ces) {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& [row, to_centroid] : neighbors) {
      ASSIGN_OR_RETURN(const double to_ce,
                       scoring::ComputeDistance(data.rows[row], ce, distance));
      if (to_ce == 0.0) continue;
      sum += to_centroid / to_ce;
      ++count;
    }
    if (count == 0) continue;
    total += sum / static_cast<double>(count);
    ++used;
  }
  if (used == 0) return std::numeric_limits<double>::quiet_NaN();
  return total / static_cast<double>(used);
}

absl::StatusOr<double> ReliabilityComposite(double data_fidelity, double validity) {
  if (!(data_fidelity >= 0.0 && data_fidelity <= 1.0) ||
      !(validity >= 0.0 && validity <= 1.0)) {
    return absl::InvalidArgumentError("Reliability inputs must lie in [0, 1]");
  }
  return 0.75 * data_fidelity + 0.25 * validity;
}

}  // namespace prefcf::metrics
