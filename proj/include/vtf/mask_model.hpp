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

// Feature model: a frozen copy of a trained base model with a trainable
// elementwise mask prepended to its inputs, so the prediction for X is
// base(m ⊗ X). The mask has no bias and no activation.

#include <cstddef>
#include <cstdint>
#include <functional>

#include "vtf/nn.hpp"

namespace vtf {

// Fresh masks are drawn i.i.d. from U(-kMaskInitBound, kMaskInitBound).
inline constexpr double kMaskInitBound = 0.05;

struct MaskLayer {
  Vector weights;
  bool trainable = true;
};

struct FeatureModel {
  MaskLayer mask;
  LayeredModel base;  // every layer frozen

  std::size_t num_features() const { return static_cast<std::size_t>(mask.weights.size()); }
};

// Deep-copies and freezes `base`, then draws the mask from `seed`. Throws
// ArgumentError when the base has no layers or has never been trained (all
// weights exactly zero).
FeatureModel build_feature_model(const LayeredModel& base, std::uint64_t seed);

// out(r, j) = mask(j) * batch(r, j).
Matrix apply_mask(const Vector& mask, const Matrix& batch);

Vector mask_weights(const FeatureModel& fm);

Matrix forward(const FeatureModel& fm, const Matrix& batch);

// Data loss of the feature model (no penalty term).
double feature_loss(const FeatureModel& fm, DataRef data);

// Gradient of feature_loss + l2_lambda * |mask|^2 with respect to the mask.
Vector mask_gradient(const FeatureModel& fm, DataRef data, double l2_lambda);

struct MaskTrainResult {
  TrainHistory history;
  std::size_t epochs_used = 0;
  bool stopped_early = false;
};

// Mini-batch ADAM on the mask only. After each epoch the full-data loss is
// passed to `stop`; training ends as soon as it returns true. Throws
// TrainingError on divergence.
MaskTrainResult train_mask(FeatureModel& fm, DataRef train_set, const TrainConfig& config,
                           const std::function<bool(std::size_t epoch, double loss)>& stop);

}  // namespace vtf
