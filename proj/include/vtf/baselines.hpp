/*
 * Copyright 2026 The vtf Authors.
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

#pragma once

// Reference importance methods used for comparison.

#include <cstddef>
#include <cstdint>

#include "vtf/dataset.hpp"
#include "vtf/importance.hpp"
#include "vtf/nn.hpp"

namespace vtf {

inline constexpr std::size_t kDefaultPermutationRepeats = 10;

// Reporting loss: plain mean squared error (1/N) for MSE models, BCE for
// classifiers. Differs from the 1/(2N) training loss on purpose so reported
// numbers read as ordinary MSE.
double metric_loss(const LayeredModel& model, DataRef data);

// Mean increase of metric_loss over `repeats` seeded shuffles of each
// column. Single estimates can be negative.
ImportanceProfile permutation_importance(const LayeredModel& model, DataRef data,
                                         const std::vector<std::string>& feature_names,
                                         std::size_t repeats, std::uint64_t seed);

// Olden's connection weights: the chained product of all weight matrices,
// summed over outputs. Activations are ignored. Ranked by magnitude.
ImportanceProfile connection_weights(const LayeredModel& model,
                                     const std::vector<std::string>& feature_names);

// Between-class over within-class variance per feature:
//   sum_k n_k (mu_jk - mu_j)^2 / sum_k n_k sigma_jk^2.
// A zero within-class variance with a nonzero numerator scores +inf and is
// listed in diagnostics["infinite_features"].
ImportanceProfile fisher_score(const Dataset& data);

}  // namespace vtf
