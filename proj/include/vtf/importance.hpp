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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vtf/nn.hpp"

namespace vtf {

enum class Method {
  kVtf,
  kRvtw,
  kCf,
  kPermutation,
  kConnectionWeights,
  kFisherScore,
  kExternal,
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

enum class Direction {
  kHigherIsMoreImportant,
  kHigherIsLessImportant,
  // Ranked by |score|, larger first. Used for signed scores such as
  // connection weights.
  kMagnitudeIsMoreImportant,
};

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct ImportanceProfile {
  Method method = Method::kVtf;
  // Display name; defaults to the method name. External rankings carry
  // their file stem here.
  std::string name;
  Direction direction = Direction::kHigherIsMoreImportant;
  Vector scores;
  // Feature indices from most to least important.
  std::vector<std::size_t> ranking;
  std::vector<std::string> feature_names;
  // Method-specific extras (residuals, flags, ...).
  nlohmann::json diagnostics = nlohmann::json::object();
};

// Most-important-first order; ties keep ascending feature index.
std::vector<std::size_t> rank(const Vector& scores, Direction direction);

// Fills name (if empty) and ranking from scores and direction.
ImportanceProfile make_profile(Method method, Direction direction, Vector scores,
                               std::vector<std::string> feature_names);

struct RankedFeature {
  std::size_t index;
  std::string name;
  double score;
  std::size_t rank;  // 1-based
};
std::vector<RankedFeature> ranked_features(const ImportanceProfile& profile);

// {method, name, direction, feature_names, scores, ranking, diagnostics}.
// Non-finite scores are written as the strings "inf", "-inf" and "nan".
nlohmann::json profile_to_json(const ImportanceProfile& p);
ImportanceProfile profile_from_json(const nlohmann::json& doc);

// name,score,rank rows in ranking order.
std::string profile_to_csv(const ImportanceProfile& p);

// External rankings: CSV with name,rank columns (rank 1 = most important).
// Every dataset feature must appear exactly once.
ImportanceProfile load_external_ranking(const std::filesystem::path& path,
                                        const std::vector<std::string>& feature_names);

}  // namespace vtf
