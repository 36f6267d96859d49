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

#include <filesystem>

#include <json.hpp>

#include "vtf/nn.hpp"

namespace vtf {

// {layers:[{in,out,activation,weights,biases,trainable}], loss_kind, input_dim}
// Weights are stored row-major (in_dim rows of out_dim values). Doubles are
// written with 17 significant digits, which round-trips exactly.
nlohmann::json model_to_json(const LayeredModel& model);
LayeredModel model_from_json(const nlohmann::json& doc);

// Writes `doc` pretty-printed with a trailing newline. Throws IoError.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace vtf
