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

#include "vtf/cf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vtf/errors.hpp"
#include "vtf/mask_model.hpp"

namespace vtf {

MuEstimator::MuEstimator(const LayeredModel& base, DataRef eval) : base_(base), eval_(eval) {
  if (static_cast<std::size_t>(eval.x.cols()) != base.input_dim()) {
    throw ShapeError("mu: evaluation data has " + std::to_string(eval.x.cols()) +
                     " features but the model expects " + std::to_string(base.input_dim()));
  }
  reference_ = performance(eval.x);
  delta_total_.resize(eval.x.cols());
  for (Eigen::Index j = 0; j < eval.x.cols(); ++j) {
    delta_total_(j) = reference_ - scaled_performance(static_cast<std::size_t>(j), 0.0);
  }
}

double MuEstimator::scaled_performance(std::size_t feature_index, double scale) const {
  Matrix scaled = eval_.x;
  scaled.col(static_cast<Eigen::Index>(feature_index)) *= scale;
  return performance(scaled);
}

double MuEstimator::performance(const Matrix& x) const {
  return loss(forward(base_, x).col(0), eval_.y, base_.loss_kind());
}

double MuEstimator::delta_total(std::size_t feature_index) const {
  return delta_total_(static_cast<Eigen::Index>(feature_index));
}

MuEstimate MuEstimator::estimate(std::size_t feature_index, double scale) const {
  if (feature_index >= num_features()) {
    throw ArgumentError("mu: feature index " + std::to_string(feature_index) + " out of range");
  }
  const auto j = static_cast<Eigen::Index>(feature_index);
  MuEstimate e;
  e.feature_index = feature_index;
  e.delta_p_total = delta_total_(j);
  e.delta_p_partial = reference_ - scaled_performance(feature_index, scale);
  if (std::abs(e.delta_p_total) < kDegenerateEffect) {
    e.degenerate = true;
    e.mu = 0.0;
  } else {
    e.mu = e.delta_p_partial / e.delta_p_total;
  }
  return e;
}

MuEstimate mu_estimate(const LayeredModel& base, DataRef eval, std::size_t feature_index,
                       double scale) {
  return MuEstimator(base, eval).estimate(feature_index, scale);
}

AugmentedSystem system_from_mu_rows(const Matrix& mu_rows) {
  AugmentedSystem s;
  s.coefficients.resize(mu_rows.rows() + 1, mu_rows.cols());
  s.coefficients.row(0).setOnes();
  s.coefficients.bottomRows(mu_rows.rows()) = mu_rows;
  s.rhs = Vector::Ones(mu_rows.rows() + 1);
  return s;
}

AugmentedSystem assemble_system(const Matrix& weights, const LayeredModel& base, DataRef eval) {
  const auto n = static_cast<std::size_t>(weights.rows());
  const auto d = static_cast<std::size_t>(weights.cols());
  if (d != base.input_dim()) {
    throw ShapeError("assemble_system: weight matrix has " + std::to_string(d) +
                     " columns but the model has " + std::to_string(base.input_dim()) +
                     " inputs");
  }
  if (n < d) {
    throw ArgumentError("assemble_system: contribution factors need at least " +
                        std::to_string(d) + " retrains (one per feature, N >= d; N > d "
                        "recommended), got " + std::to_string(n));
  }
  const MuEstimator estimator(base, eval);
  Matrix mu(weights.rows(), weights.cols());
  std::vector<std::size_t> degenerate;
  for (std::size_t j = 0; j < d; ++j) {
    if (std::abs(estimator.delta_total(j)) < kDegenerateEffect) degenerate.push_back(j);
  }
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      MuEstimate e = estimator.estimate(static_cast<std::size_t>(j), weights(i, j));
      e.retrain_index = static_cast<std::size_t>(i);
      mu(i, j) = e.degenerate ? 0.0 : e.mu;
    }
  }
  AugmentedSystem s = system_from_mu_rows(mu);
  s.degenerate_features = std::move(degenerate);
  return s;
}

AugmentedSystem assemble_system(const WeightMatrix& weights, const LayeredModel& base,
                                DataRef eval) {
  return assemble_system(weights.rows(), base, eval);
}

RrefResult rref(const Matrix& m) {
  if (m.size() == 0) throw ArgumentError("rref: empty matrix");
  RrefResult out;
  Matrix a = m;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index pivot = r;
    a.col(c).segment(r, rows - r).cwiseAbs().maxCoeff(&pivot);
    pivot += r;
    if (std::abs(a(pivot, c)) < kRrefZero) {
      a.col(c).segment(r, rows - r).setZero();
      continue;
    }
    if (pivot != r) a.row(pivot).swap(a.row(r));
    a.row(r) /= a(r, c);
    a(r, c) = 1.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = a(i, c);
      if (f != 0.0) {
        a.row(i) -= f * a.row(r);
        a(i, c) = 0.0;
      }
    }
    out.pivots.push_back(static_cast<std::size_t>(c));
    ++r;
  }
  a = a.unaryExpr([](double v) { return std::abs(v) < kRrefZero ? 0.0 : v; });
  out.reduced = std::move(a);
  return out;
}

ContributionVector solve_contributions(const AugmentedSystem& system) {
  const Matrix& a = system.coefficients;
  if (a.rows() == 0 || a.cols() == 0) throw ArgumentError("solve_contributions: empty system");
  if (system.rhs.size() != a.rows()) {
    throw ShapeError("solve_contributions: rhs length does not match the coefficient rows");
  }
  const Eigen::Index d = a.cols();
  Matrix augmented(a.rows(), d + 1);
  augmented << a, system.rhs;
  const RrefResult reduced = rref(augmented);
  const auto rank = static_cast<Eigen::Index>(
      std::count_if(reduced.pivots.begin(), reduced.pivots.end(),
                    [&](std::size_t c) { return static_cast<Eigen::Index>(c) < d; }));
  const bool consistent =
      std::none_of(reduced.pivots.begin(), reduced.pivots.end(),
                   [&](std::size_t c) { return static_cast<Eigen::Index>(c) == d; });

  ContributionVector out;
  out.consistent = consistent;
  if (consistent && rank == d) {
    out.raw = reduced.reduced.col(d).head(d);
    out.solver = "rref";
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    out.raw = cod.solve(system.rhs);
    out.rank_deficient = cod.rank() < d;
    out.solver = "least_squares";
  }
  out.residual_norm = (a * out.raw - system.rhs).norm();
  const double sum = out.raw.sum();
  if (std::abs(sum) < kDegenerateEffect || !std::isfinite(sum)) {
    out.normalization_ok = false;
  } else {
    out.normalized = out.raw / sum;
  }
  return out;
}

ImportanceProfile cf_profile(const AugmentedSystem& system,
                             std::vector<std::string> feature_names) {
  const ContributionVector c = solve_contributions(system);
  if (!c.normalization_ok) {
    std::ostringstream msg;
    msg << "cf: raw contributions sum to ~0, cannot normalize; raw = ["
        << c.raw.transpose() << "]";
    throw NormalizationError(msg.str());
  }
  ImportanceProfile p = make_profile(Method::kCf, Direction::kHigherIsMoreImportant,
                                     c.normalized, std::move(feature_names));
  p.diagnostics = solution_to_json(c, system.degenerate_features);
  std::vector<std::size_t> negative;
  for (Eigen::Index j = 0; j < c.normalized.size(); ++j) {
    if (c.normalized(j) < 0.0) negative.push_back(static_cast<std::size_t>(j));
  }
  p.diagnostics["negative_contributions"] = negative;
  return p;
}

ImportanceProfile cf_profile(const WeightMatrix& weights, const LayeredModel& base,
                             DataRef eval) {
  return cf_profile(assemble_system(weights, base, eval), weights.feature_names);
}

Matrix contribution_trajectory(const AugmentedSystem& system, std::size_t min_rows) {
  const Eigen::Index mu_rows = system.coefficients.rows() - 1;
  const auto start = static_cast<Eigen::Index>(std::max<std::size_t>(min_rows, 1));
  if (start > mu_rows) {
    throw ArgumentError("contribution_trajectory: system has only " +
                        std::to_string(mu_rows) + " mu rows");
  }
  Matrix out(mu_rows - start + 1, system.coefficients.cols());
  for (Eigen::Index k = start; k <= mu_rows; ++k) {
    AugmentedSystem prefix;
    prefix.coefficients = system.coefficients.topRows(k + 1);
    prefix.rhs = system.rhs.head(k + 1);
    const ContributionVector c = solve_contributions(prefix);
    out.row(k - start) = c.normalization_ok
                             ? Eigen::RowVectorXd(c.normalized.transpose())
                             : Eigen::RowVectorXd::Constant(system.coefficients.cols(),
                                                            std::nan(""));
  }
  return out;
}

std::string system_to_csv(const AugmentedSystem& system,
                          const std::vector<std::string>& feature_names) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& name : feature_names) out << name << ',';
  out << "rhs\n";
  for (Eigen::Index i = 0; i < system.coefficients.rows(); ++i) {
    for (Eigen::Index j = 0; j < system.coefficients.cols(); ++j) {
      out << system.coefficients(i, j) << ',';
    }
    out << system.rhs(i) << '\n';
  }
  return out.str();
}

nlohmann::json solution_to_json(const ContributionVector& c,
                                const std::vector<std::size_t>& degenerate_features) {
  nlohmann::json doc = {
      {"raw", std::vector<double>(c.raw.begin(), c.raw.end())},
      {"residual_norm", c.residual_norm},
      {"rank_deficient", c.rank_deficient},
      {"consistent", c.consistent},
      {"solver", c.solver},
      {"degenerate_features", degenerate_features},
  };
  if (c.normalization_ok) {
    doc["normalized"] = std::vector<double>(c.normalized.begin(), c.normalized.end());
  } else {
    doc["normalized"] = nullptr;
  }
  return doc;
}

}  // namespace vtf
