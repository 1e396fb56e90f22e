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

#ifndef PREFCF_METRICS_H_
#define PREFCF_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "prefcf/models.h"
#include "prefcf/scoring.h"
#include "prefcf/tabular.h"

namespace prefcf::metrics {

using VectorList = std::span<const std::vector<double>>;

inline constexpr int kDefaultCentralityNeighbors = 10;

// Mean distance from each CE to the query.
absl::StatusOr<double> Proximity(VectorList ces, std::span<const double> query,
                                 scoring::Distance distance = scoring::Distance::kEuclidean);

// Mean number of features each CE changes.
absl::StatusOr<double> Sparsity(VectorList ces, std::span<const double> query);

// Fraction of CEs the model assigns to the target class.
absl::StatusOr<double> Validity(VectorList ces, const models::ClassifierModel& model);

// Weighted mean of per-member scores: sum(w_i p_i) / sum(w_i).
absl::StatusOr<double> WeightedFidelity(std::span<const double> weights,
                                        std::span<const double> scores);

// Every CE is labelled as the target class; each jury member's p_i is the F1
// of its predictions against those labels.
absl::StatusOr<double> DataFidelity(VectorList ces, const models::ThirdPartyJury& jury);

// Mean of d(x_i, centroid) / d(x_i, ce) over the `n_neighbors` target-class
// rows nearest the target-class centroid. Errors if the CE coincides with one
// of those rows.
absl::StatusOr<double> Centrality(std::span<const double> ce,
                                  const tabular::EncodedData& data, int n_neighbors,
                                  scoring::Distance distance = scoring::Distance::kEuclidean);

// Mean centrality over a CE set for report rows. Neighbors that coincide with
// a CE are left out of that CE's average; a CE with no usable neighbor is
// skipped. NaN when nothing remains.
absl::StatusOr<double> MeanCentrality(VectorList ces, const tabular::EncodedData& data,
                                      int n_neighbors,
                                      scoring::Distance distance = scoring::Distance::kEuclidean);

// 0.75 * data_fidelity + 0.25 * validity.
absl::StatusOr<double> ReliabilityComposite(double data_fidelity, double validity);

struct MetricsReport {
  std::string dataset;
  std::string generator;
  char preference = 'a';
  double proximity = 0.0;
  double sparsity = 0.0;
  double validity = 0.0;
  double data_fidelity = 0.0;
  double centrality = 0.0;
  double runtime_seconds = 0.0;
  size_t queries = 0;
  size_t ces = 0;
};

}  // namespace prefcf::metrics

#endif  // PREFCF_METRICS_H_
