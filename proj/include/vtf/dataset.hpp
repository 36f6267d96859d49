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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vtf/nn.hpp"

namespace vtf {

enum class TaskKind { kRegression, kBinaryClassification };
std::string_view to_string(TaskKind t);
TaskKind task_kind_from_string(std::string_view s);

// Per-feature z-score parameters estimated on a training split.
struct Standardization {
  Vector mean;
  Vector std;                 // population std; 1 for constant columns
  std::vector<bool> constant;  // true where the raw std was zero
};

struct Dataset {
  Matrix features;  // n x d
  Vector target;    // n
  std::vector<std::string> feature_names;
  std::string target_name = "target";
  TaskKind task = TaskKind::kRegression;
  std::optional<Standardization> standardization;
  // True coefficients for synthetic data.
  std::optional<Vector> ground_truth;

  std::size_t num_samples() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }
  DataRef ref() const { return DataRef{features, target}; }

  // Throws ArgumentError/ShapeError when an invariant is violated.
  void validate() const;
};

struct CsvSchema {
  // Header name of the target column. Without a header it is a 0-based
  // column index. Empty selects the last column.
  std::string target_column;
  bool has_header = true;
  TaskKind task = TaskKind::kRegression;
};

// Comma-separated reals. Blank lines and lines starting with '#' are skipped.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Seeded shuffle, then the first round(ratio * n) rows go to train.
std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed);

// Row subset in the given order.
Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& rows);
// Column subset in the given order.
Dataset select_columns(const Dataset& data, const std::vector<std::size_t>& columns);

// Fits z-score parameters on `train` only and applies them to both.
std::pair<Dataset, Dataset> standardize(const Dataset& train, const Dataset& test);
Standardization fit_standardization(const Matrix& x);
Matrix apply_standardization(const Standardization& s, const Matrix& x);

// Standard-normal features, y = x * coefficients + N(0, noise_std^2).
// Feature names are x1..xd.
Dataset synth_linear(std::size_t n, const Vector& coefficients, double noise_std,
                     std::uint64_t seed);

// Hex FNV-1a digest over names, task and numeric payload.
std::string dataset_hash(const Dataset& data);

}  // namespace vtf
