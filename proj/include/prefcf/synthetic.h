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

#ifndef PREFCF_SYNTHETIC_H_
#define PREFCF_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "prefcf/tabular.h"

namespace prefcf::synthetic {

// Random binary-labelled dataset with `num_features` columns: every third
// column is categorical with four levels, the rest numeric, and column 0 is
// immutable. Labels follow a noisy logistic rule over all columns so every
// feature carries some signal. Deterministic for a given seed.
tabular::Dataset MakeScalingDataset(size_t num_features, size_t num_rows, uint64_t seed);

}  // namespace prefcf::synthetic

#endif  // PREFCF_SYNTHETIC_H_
