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

// Variance tolerance scores computed from a matrix of Rashomon masks
// (one row per accepted retrain, one column per feature).

#include <cstddef>
#include <string>
#include <vector>

#include "vtf/importance.hpp"

namespace vtf {

inline constexpr double kDefaultSelectionThreshold = 1.0;
// Lower bound applied to the per-column standard deviation in RVTW.
inline constexpr double kStdFloor = 1e-12;

// t_j = mean_i |w_ij - 1|. Small t means the models tolerate little change
// in feature j, so the profile direction is higher_is_less_important.
ImportanceProfile vtf_scores(const Matrix& weights, std::vector<std::string> feature_names);

// Indices j with t_j > threshold, ascending. One comparison per feature.
std::vector<std::size_t> select_unimportant(const ImportanceProfile& vtf_profile,
                                            double threshold = kDefaultSelectionThreshold);

// v_j = mean(w_j) / (mean(|w_j - 1|) * std(w_j)) with the population std
// floored at kStdFloor. Requires at least two rows.
ImportanceProfile rvtw_scores(const Matrix& weights, std::vector<std::string> feature_names);

}  // namespace vtf
