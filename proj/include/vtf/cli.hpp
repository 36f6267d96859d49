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
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtf/config.hpp"
#include "vtf/dataset.hpp"
#include "vtf/importance.hpp"
#include "vtf/nn.hpp"
#include "vtf/rashomon.hpp"

namespace vtf::cli {

// Output file names inside the output directory.
inline constexpr const char* kBaseModelFile = "base_model.json";
inline constexpr const char* kBaseHistoryFile = "base_history.csv";
inline constexpr const char* kBaseMetricsFile = "base_metrics.json";
inline constexpr const char* kWeightsFile = "weights.json";
inline constexpr const char* kSelectionFile = "selection.json";
inline constexpr const char* kComparisonFile = "comparison";
inline constexpr const char* kReportFile = "report.md";

// Loaded dataset with the split and standardization a run configuration
// prescribes.
struct Workspace {
  RunConfig config;
  Dataset full;
  Dataset train;
  Dataset test;
  std::string dataset_hash;
  std::string config_digest;

  nlohmann::json provenance() const;
  std::filesystem::path out(const std::string& name) const { return config.out_dir / name; }
};

Workspace open_workspace(const RunConfig& config);

LayeredModel read_base_model(const Workspace& ws);
WeightMatrix read_weights(const Workspace& ws);

// Scores `method` ("vtf", "rvtw", "cf", "permutation", "cw", "fisher") for
// the workspace, reading the stored base model and weight matrix as needed.
ImportanceProfile compute_profile(const Workspace& ws, const std::string& method);

int cmd_train_base(const Workspace& ws, std::ostream& out);
int cmd_explore(const Workspace& ws, std::ostream& out, std::ostream& err);
int cmd_explain(const Workspace& ws, const std::string& method, std::ostream& out);
int cmd_select(const Workspace& ws, std::ostream& out);
int cmd_evaluate(const Workspace& ws, std::ostream& out);
int cmd_report(const Workspace& ws, std::ostream& out);

// Full command-line entry point. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vtf::cli
