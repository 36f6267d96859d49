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

#include "vtf/mask_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vtf/errors.hpp"

namespace vtf {

FeatureModel build_feature_model(const LayeredModel& base, std::uint64_t seed) {
  if (base.num_layers() == 0 || base.input_dim() == 0) {
    throw ArgumentError("build_feature_model: base model has no layers");
  }
  const bool untrained = std::all_of(base.layers().begin(), base.layers().end(),
                                     [](const DenseLayer& l) { return l.weights.isZero(0.0); });
  if (untrained) throw ArgumentError("build_feature_model: base model looks untrained");

  FeatureModel fm;
  fm.base = freeze(base);
  fm.mask.weights.resize(static_cast<Eigen::Index>(base.input_dim()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-kMaskInitBound, kMaskInitBound);
  for (Eigen::Index j = 0; j < fm.mask.weights.size(); ++j) {
    double w = dist(rng);
    // uniform_real_distribution is half-open; keep the draw strictly inside.
    while (w <= -kMaskInitBound) w = dist(rng);
    fm.mask.weights(j) = w;
  }
  return fm;
}

Matrix apply_mask(const Vector& mask, const Matrix& batch) {
  if (mask.size() != batch.cols()) {
    throw ShapeError("apply_mask: mask has " + std::to_string(mask.size()) +
                     " entries but batch has " + std::to_string(batch.cols()) + " columns");
  }
  return batch * mask.asDiagonal();
}

Vector mask_weights(const FeatureModel& fm) { return fm.mask.weights; }

Matrix forward(const FeatureModel& fm, const Matrix& batch) {
  return forward(fm.base, apply_mask(fm.mask.weights, batch));
}

double feature_loss(const FeatureModel& fm, DataRef data) {
  const Matrix pred = forward(fm, data.x);
  return loss(pred.col(0), data.y, fm.base.loss_kind());
}

Vector mask_gradient(const FeatureModel& fm, DataRef data, double l2_lambda) {
  const Matrix masked = apply_mask(fm.mask.weights, data.x);
  const Gradients g = backward(fm.base, DataRef{masked, data.y}, 0.0);
  // d(masked)/d(mask_j) = x(:, j)
  Vector grad = g.input.cwiseProduct(data.x).colwise().sum().transpose();
  if (l2_lambda > 0.0) grad += 2.0 * l2_lambda * fm.mask.weights;
  return grad;
}

MaskTrainResult train_mask(FeatureModel& fm, DataRef train_set, const TrainConfig& config,
                           const std::function<bool(std::size_t, double)>& stop) {
  config.validate();
  if (train_set.x.rows() == 0) throw ArgumentError("train_mask: empty training set");
  if (train_set.x.cols() != fm.mask.weights.size()) {
    throw ShapeError("train_mask: dataset has " + std::to_string(train_set.x.cols()) +
                     " features but mask has " + std::to_string(fm.mask.weights.size()));
  }
  MaskTrainResult result;
  const auto n = static_cast<std::size_t>(train_set.x.rows());
  AdamState state;
  Matrix bx;
  Vector by;
  long last_finite = -1;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (fm.mask.trainable) {
      const auto order = epoch_permutation(n, config.seed, epoch);
      for (std::size_t start = 0; start < n; start += config.batch_size) {
        const std::size_t end = std::min(n, start + config.batch_size);
        const auto rows = static_cast<Eigen::Index>(end - start);
        bx.resize(rows, train_set.x.cols());
        by.resize(rows);
        for (std::size_t i = start; i < end; ++i) {
          const auto r = static_cast<Eigen::Index>(i - start);
          bx.row(r) = train_set.x.row(static_cast<Eigen::Index>(order[i]));
          by(r) = train_set.y(static_cast<Eigen::Index>(order[i]));
        }
        Vector grad;
        try {
          grad = mask_gradient(fm, DataRef{bx, by}, config.l2_lambda);
        } catch (const NumericalError& e) {
          throw TrainingError(std::string("mask training diverged: ") + e.what(), last_finite);
        }
        adam_step(fm.mask.weights, grad, state, config);
        if (!fm.mask.weights.allFinite()) {
          throw TrainingError("mask training diverged at epoch " + std::to_string(epoch),
                              last_finite);
        }
      }
    }
    const double epoch_loss = feature_loss(fm, train_set);
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("mask training loss is not finite at epoch " + std::to_string(epoch),
                          last_finite);
    }
    result.history.train_loss.push_back(epoch_loss);
    result.epochs_used = epoch + 1;
    last_finite = static_cast<long>(epoch);
    if (stop && stop(epoch, epoch_loss)) {
      result.stopped_early = true;
      break;
    }
  }
  result.history.final_loss =
      result.history.train_loss.empty() ? 0.0 : result.history.train_loss.back();
  return result;
}

}  // namespace vtf
