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

#include "vtf/vtf.hpp"

#include <algorithm>
#include <cmath>

#include "vtf/errors.hpp"

namespace vtf {

ImportanceProfile vtf_scores(const Matrix& weights, std::vector<std::string> feature_names) {
  if (weights.rows() < 1 || weights.cols() < 1) {
    throw ArgumentError("vtf_scores: weight matrix is empty");
  }
  Vector t = (weights.array() - 1.0).abs().colwise().mean().transpose();
  return make_profile(Method::kVtf, Direction::kHigherIsLessImportant, std::move(t),
                      std::move(feature_names));
}

std::vector<std::size_t> select_unimportant(const ImportanceProfile& vtf_profile,
                                            double threshold) {
  if (!(threshold > 0.0)) throw ArgumentError("select_unimportant: threshold must be > 0");
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < vtf_profile.scores.size(); ++j) {
    if (vtf_profile.scores(j) > threshold) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

ImportanceProfile rvtw_scores(const Matrix& weights, std::vector<std::string> feature_names) {
  if (weights.rows() < 2) {
    throw ArgumentError("rvtw_scores: need at least 2 retrains, got " +
                        std::to_string(weights.rows()));
  }
  const Eigen::Index d = weights.cols();
  Vector v(d);
  std::vector<std::size_t> floored;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = weights.col(j).array();
    const double mean = col.mean();
    const double mean_t = (col - 1.0).abs().mean();
    double sd = std::sqrt((col - mean).square().mean());
    if (sd < kStdFloor) {
      sd = kStdFloor;
      floored.push_back(static_cast<std::size_t>(j));
    }
    // A column pinned at exactly 1 has mean_t == 0 as well.
    const double denom = std::max(mean_t, kStdFloor) * sd;
    v(j) = mean / denom;
  }
  ImportanceProfile p = make_profile(Method::kRvtw, Direction::kHigherIsMoreImportant,
                                     std::move(v), std::move(feature_names));
  p.diagnostics["std_floored_features"] = floored;
  p.diagnostics["retrains"] = weights.rows();
  return p;
}

}  // namespace vtf
