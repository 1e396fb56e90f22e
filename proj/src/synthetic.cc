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

#include "prefcf/synthetic.h"

#include <cmath>
#include <random>
#include <string>

#include "absl/strings/str_cat.h"

namespace prefcf::synthetic {

tabular::Dataset MakeScalingDataset(size_t num_features, size_t num_rows, uint64_t seed) {
  static constexpr const char* kLevels[] = {"w", "x", "y", "z"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 3);
  std::normal_distribution<double> noise(0.0, 0.5);

  tabular::Dataset data;
  data.target_name = "label";
  data.target_class = "pos";
  for (size_t f = 0; f < num_features; ++f) {
    tabular::FeatureSchema feature;
    feature.name = absl::StrCat("f", f);
    feature.mutability =
        f == 0 ? tabular::Mutability::kImmutable : tabular::Mutability::kMutable;
    if (f % 3 == 2) {
      feature.kind = tabular::FeatureKind::kCategorical;
      feature.categories.assign(std::begin(kLevels), std::end(kLevels));
    } else {
      feature.kind = tabular::FeatureKind::kNumeric;
    }
    data.schema.push_back(std::move(feature));
  }
  const double scale = 4.0 / std::sqrt(static_cast<double>(num_features));
  for (size_t r = 0; r < num_rows; ++r) {
    tabular::RawRow row;
    double logit = 0.0;
    for (size_t f = 0; f < num_features; ++f) {
      if (data.schema[f].categorical()) {
        const int l = level(rng);
        row.emplace_back(std::string(kLevels[l]));
        logit += scale * (l - 1.5) / 1.5;
      } else {
        const double value = std::round(unit(rng) * 10000.0) / 100.0;
        row.emplace_back(value);
        logit += scale * (value - 50.0) / 50.0 * (f % 2 == 0 ? 1.0 : -1.0);
      }
    }
    logit += noise(rng);
    data.rows.push_back(std::move(row));
    data.labels.emplace_back(logit > 0.0 ? "pos" : "neg");
  }
  return data;
}

}  // namespace prefcf::synthetic
