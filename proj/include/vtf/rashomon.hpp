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

// Rashomon exploration: retrain feature models over a frozen base until each
// one's training loss is within epsilon of the base loss, and collect the
// resulting mask vectors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtf/nn.hpp"

namespace vtf {

// L(f) <= L(f*) + epsilon, boundary inclusive.
bool in_rashomon(double loss, double base_loss, double epsilon);

struct Tolerance {
  enum class Mode { kRelative, kAbsolute };
  Mode mode = Mode::kRelative;
  double value = 0.01;

  double resolve(double base_loss) const {
    return mode == Mode::kRelative ? value * base_loss : value;
  }
};

struct RashomonConfig {
  Tolerance epsilon;
  std::size_t max_epochs_per_retrain = 1000;
  std::size_t n_retrains = 250;
  std::uint64_t base_seed = 3;
  // Only batch size, ADAM settings and l2_lambda are used; the epoch budget
  // comes from max_epochs_per_retrain and the seed from each retrain.
  TrainConfig train_config{.epochs = 1000, .batch_size = 10, .l2_lambda = 1e-4};
  // Worker threads for explore(); results do not depend on it.
  std::size_t jobs = 1;

  void validate() const;
};

// max(d + 10, 250) for d <= 30, else d + 10.
std::size_t default_retrain_count(std::size_t num_features);

struct RetrainRecord {
  std::size_t retrain_index = 0;
  std::uint64_t seed = 0;
  Vector final_mask;
  double final_loss = 0.0;
  std::size_t epochs_used = 0;
  bool accepted = false;
  std::string diagnostic;
};

struct WeightMatrix {
  double base_loss = 0.0;
  double epsilon = 0.0;
  std::vector<std::string> feature_names;
  std::vector<RetrainRecord> records;  // accepted only, in retrain_index order
  std::size_t attempted = 0;

  std::size_t num_rows() const { return records.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  // N x d matrix of accepted masks.
  Matrix rows() const;
};

RetrainRecord retrain_once(const LayeredModel& base, DataRef train_set, double base_loss,
                           const RashomonConfig& config, std::uint64_t seed,
                           std::size_t retrain_index);

using ProgressFn = std::function<void(const RetrainRecord&)>;

// Runs retrains with seeds base_seed + 0 .. base_seed + n - 1. Output is
// identical for any `jobs` value. Throws ExplorationError when nothing is
// accepted. `progress` is called once per retrain, serialized, in completion
// order.
WeightMatrix explore(const LayeredModel& base, DataRef train_set,
                     const std::vector<std::string>& feature_names,
                     const RashomonConfig& config, const ProgressFn& progress = {});

// Row k holds the column means of the first k + 1 rows.
Matrix stability_curve(const Matrix& weights);

nlohmann::json weight_matrix_to_json(const WeightMatrix& wm);
WeightMatrix weight_matrix_from_json(const nlohmann::json& doc);

// Convenience for tests and analyses that start from raw masks.
WeightMatrix weight_matrix_from_rows(const Matrix& rows, std::vector<std::string> names);

}  // namespace vtf
