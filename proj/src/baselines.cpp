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

#include "vtf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "vtf/errors.hpp"

namespace vtf {

double metric_loss(const LayeredModel& model, DataRef data) {
  const Vector pred = forward(model, data.x).col(0);
  if (model.loss_kind() == LossKind::kMse) {
    if (pred.size() == 0) throw ArgumentError("metric_loss: empty data");
    return (pred - data.y).squaredNorm() / static_cast<double>(pred.size());
  }
  return loss(pred, data.y, model.loss_kind());
}

ImportanceProfile permutation_importance(const LayeredModel& model, DataRef data,
                                         const std::vector<std::string>& feature_names,
                                         std::size_t repeats, std::uint64_t seed) {
  if (repeats < 1) throw ArgumentError("permutation_importance: repeats must be >= 1");
  const double baseline = metric_loss(model, data);
  const Eigen::Index d = data.x.cols();
  const auto n = static_cast<std::size_t>(data.x.rows());
  Vector scores = Vector::Zero(d);
  Matrix shuffled = data.x;
  std::vector<std::size_t> order(n);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j) * 0x9e3779b97f4a7c15ULL);
    double total = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = 0; i < n; ++i) {
        shuffled(static_cast<Eigen::Index>(i), j) = data.x(static_cast<Eigen::Index>(order[i]), j);
      }
      total += metric_loss(model, DataRef{shuffled, data.y}) - baseline;
    }
    shuffled.col(j) = data.x.col(j);
    scores(j) = total / static_cast<double>(repeats);
  }
  ImportanceProfile p = make_profile(Method::kPermutation, Direction::kHigherIsMoreImportant,
                                     std::move(scores), feature_names);
  p.diagnostics["baseline_metric"] = baseline;
  p.diagnostics["repeats"] = repeats;
  return p;
}

ImportanceProfile connection_weights(const LayeredModel& model,
                                     const std::vector<std::string>& feature_names) {
  if (model.num_layers() == 0) throw ArgumentError("connection_weights: model has no layers");
  Matrix chain = model.layer(0).weights;
  for (std::size_t k = 1; k < model.num_layers(); ++k) chain = chain * model.layer(k).weights;
  Vector scores = chain.rowwise().sum();
  return make_profile(Method::kConnectionWeights, Direction::kMagnitudeIsMoreImportant,
                      std::move(scores), feature_names);
}

ImportanceProfile fisher_score(const Dataset& data) {
  data.validate();
  std::map<double, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < data.target.size(); ++i) classes[data.target(i)].push_back(i);
  if (classes.size() < 2) throw ArgumentError("fisher_score: need at least 2 classes");
  for (const auto& [label, rows] : classes) {
    if (rows.size() < 2) {
      throw ArgumentError("fisher_score: class " + std::to_string(label) +
                          " has fewer than 2 samples");
    }
  }
  const Eigen::Index d = data.features.cols();
  Vector scores(d);
  std::vector<std::size_t> infinite;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double overall = data.features.col(j).mean();
    double between = 0.0;
    double within = 0.0;
    for (const auto& [label, rows] : classes) {
      double mean = 0.0;
      for (Eigen::Index r : rows) mean += data.features(r, j);
      mean /= static_cast<double>(rows.size());
      double var = 0.0;
      for (Eigen::Index r : rows) var += (data.features(r, j) - mean) * (data.features(r, j) - mean);
      var /= static_cast<double>(rows.size());
      if (var < 1e-24 * (1.0 + mean * mean)) var = 0.0;  // rounding residue of a constant
      const auto nk = static_cast<double>(rows.size());
      between += nk * (mean - overall) * (mean - overall);
      within += nk * var;
    }
    const auto n = static_cast<double>(data.target.size());
    if (between < 1e-24 * n * (1.0 + overall * overall)) between = 0.0;
    if (within > 0.0) {
      scores(j) = between / within;
    } else if (between > 0.0) {
      scores(j) = std::numeric_limits<double>::infinity();
      infinite.push_back(static_cast<std::size_t>(j));
    } else {
      scores(j) = 0.0;
    }
  }
  ImportanceProfile p = make_profile(Method::kFisherScore, Direction::kHigherIsMoreImportant,
                                     std::move(scores), data.feature_names);
  p.diagnostics["infinite_features"] = infinite;
  return p;
}

}  // namespace vtf
