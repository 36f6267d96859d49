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

// Contribution factors. For every accepted mask and every feature, the
// ratio mu = dP_partial / dP_total compares the performance change from
// scaling that one feature by its mask weight (all others at 1) with the
// change from zeroing it. Each retrain yields one equation
// sum_j mu_ij C_j = 1, and the additivity row sum_j C_j = 1 heads the
// system. Solving and normalizing gives per-feature contributions.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtf/importance.hpp"
#include "vtf/nn.hpp"
#include "vtf/rashomon.hpp"

namespace vtf {

// |dP_total| below this marks a feature with no measurable effect.
inline constexpr double kDegenerateEffect = 1e-12;
// RREF snaps entries with magnitude below this to zero.
inline constexpr double kRrefZero = 1e-10;

struct MuEstimate {
  std::size_t retrain_index = 0;
  std::size_t feature_index = 0;
  double delta_p_partial = 0.0;
  double delta_p_total = 0.0;
  double mu = 0.0;
  bool degenerate = false;
};

// Caches the reference performance and the per-feature zeroing effect so
// that filling an N x d system costs one forward pass per entry.
class MuEstimator {
 public:
  MuEstimator(const LayeredModel& base, DataRef eval);

  MuEstimate estimate(std::size_t feature_index, double scale) const;

  double reference_performance() const { return reference_; }
  double delta_total(std::size_t feature_index) const;
  std::size_t num_features() const { return static_cast<std::size_t>(delta_total_.size()); }

  // Performance of the base model on `x` (same metric used for mu).
  double performance(const Matrix& x) const;
  // Performance with column `feature_index` multiplied by `scale`.
  double scaled_performance(std::size_t feature_index, double scale) const;

 private:
  const LayeredModel& base_;
  DataRef eval_;
  double reference_ = 0.0;
  Vector delta_total_;
};

MuEstimate mu_estimate(const LayeredModel& base, DataRef eval, std::size_t feature_index,
                       double scale);

struct AugmentedSystem {
  Matrix coefficients;  // (N + 1) x d; row 0 is all ones
  Vector rhs;           // all ones
  std::vector<std::size_t> degenerate_features;
};

// Throws ArgumentError when the matrix has fewer rows than features.
AugmentedSystem assemble_system(const WeightMatrix& weights, const LayeredModel& base,
                                DataRef eval);
AugmentedSystem assemble_system(const Matrix& weights, const LayeredModel& base, DataRef eval);

// Prepends the additivity row and an all-ones right-hand side to raw mu rows.
AugmentedSystem system_from_mu_rows(const Matrix& mu_rows);

struct RrefResult {
  Matrix reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

// Gauss-Jordan elimination with partial (largest magnitude) pivoting.
RrefResult rref(const Matrix& m);

struct ContributionVector {
  Vector raw;
  Vector normalized;  // raw / sum(raw); empty when normalization failed
  double residual_norm = 0.0;
  bool rank_deficient = false;
  bool consistent = true;      // RREF found no contradictory row
  bool normalization_ok = true;
  std::string solver;          // "rref" or "least_squares"
};

// Exact RREF solution for consistent full-rank systems; otherwise the
// minimum-norm least-squares solution from a complete orthogonal
// decomposition. Never throws on a tiny sum; see normalization_ok.
ContributionVector solve_contributions(const AugmentedSystem& system);

// Runs the whole chain and builds a CF profile. Throws NormalizationError
// when the raw contributions sum to ~0.
ImportanceProfile cf_profile(const WeightMatrix& weights, const LayeredModel& base,
                             DataRef eval);
ImportanceProfile cf_profile(const AugmentedSystem& system,
                             std::vector<std::string> feature_names);

// Normalized solutions as mu rows accumulate: row k uses the additivity row
// plus the first min_rows + k mu rows.
Matrix contribution_trajectory(const AugmentedSystem& system, std::size_t min_rows);

std::string system_to_csv(const AugmentedSystem& system,
                          const std::vector<std::string>& feature_names);
nlohmann::json solution_to_json(const ContributionVector& c,
                                const std::vector<std::size_t>& degenerate_features);

}  // namespace vtf
