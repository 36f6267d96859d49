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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtf/dataset.hpp"
#include "vtf/evaluation.hpp"
#include "vtf/nn.hpp"
#include "vtf/rashomon.hpp"

namespace vtf {

inline constexpr const char* kToolVersion = "0.1.0";

struct DatasetConfig {
  std::filesystem::path path;
  CsvSchema schema;
  bool standardize = true;
  double split_ratio = 0.8;
};

struct BaseModelConfig {
  ModelFamily family = ModelFamily::kLinear;
  std::vector<std::size_t> hidden;
};

struct RunConfig {
  DatasetConfig dataset;
  BaseModelConfig base_model;
  TrainConfig train;
  RashomonConfig rashomon;
  // 0 selects default_retrain_count(d).
  std::size_t n_retrains = 0;
  std::vector<std::string> methods{"vtf", "rvtw", "cf"};
  IndependentModelSpec independent;
  std::vector<double> fractions = default_fractions();
  std::vector<std::filesystem::path> external_rankings;
  double threshold = 1.0;
  std::size_t permutation_repeats = 10;
  std::uint64_t seed = 3;
  std::filesystem::path out_dir = "out";

  // Copies `seed` into every seeded component.
  void apply_seed();
  void validate() const;
};

// Missing keys keep their defaults. Unknown keys are rejected. Throws
// ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical JSON form.
std::string config_digest(const RunConfig& config);

// VTF_SEED, if set. Throws ConfigError when it is not an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

}  // namespace vtf
