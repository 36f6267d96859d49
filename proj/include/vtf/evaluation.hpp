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

// Drop-and-refit evaluation: remove the least important fraction of
// features according to a ranking, train a fresh independent model on what
// is left, and record the test metric for each fraction.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtf/dataset.hpp"
#include "vtf/importance.hpp"
#include "vtf/nn.hpp"

namespace vtf {

// 0.1, 0.2, ..., 0.9
std::vector<double> default_fractions();

struct IndependentModelSpec {
  ModelFamily family = ModelFamily::kLinear;
  std::vector<std::size_t> hidden;
  TrainConfig train{.epochs = 150, .batch_size = 100};
};

struct DroppedFeatures {
  Dataset data;
  std::vector<std::size_t> removed;  // ascending
  std::vector<std::size_t> kept;     // ascending, original column order
};

// Removes floor(fraction * d) features from the tail of `ranking` (the
// least important ones). Throws ArgumentError when nothing would remain.
DroppedFeatures drop_features(const Dataset& data, const std::vector<std::size_t>& ranking,
                              double fraction);
DroppedFeatures drop_columns(const Dataset& data, const std::vector<std::size_t>& removed);

// Number of features drop_features removes.
std::size_t drop_count(std::size_t num_features, double fraction);

// Test MSE (regression) or accuracy (classification) of a freshly
// initialized model trained on `train`.
double independent_fit(const Dataset& train, const Dataset& test,
                       const IndependentModelSpec& spec);

bool metric_higher_is_better(TaskKind task);

struct CurvePoint {
  double fraction = 0.0;
  std::size_t removed = 0;
  std::optional<double> metric;  // empty marks a failed fit
  std::string error;
};

struct SelectionCurve {
  std::string method;
  std::vector<CurvePoint> points;
  double baseline_metric = 0.0;  // all features kept
  bool higher_is_better = false;
  IndependentModelSpec spec;
  double wall_time_ms = 0.0;
};

SelectionCurve selection_curve(const Dataset& train, const Dataset& test,
                               const ImportanceProfile& profile, const IndependentModelSpec& spec,
                               const std::vector<double>& fractions = default_fractions());

struct OneShotSelection {
  double threshold = 1.0;
  std::vector<std::size_t> removed;
  std::vector<std::string> removed_names;
  std::optional<double> metric;  // empty when nothing was removed
  double baseline_metric = 0.0;
};

// Refit after removing the VTF features above `threshold`.
OneShotSelection one_shot_selection(const Dataset& train, const Dataset& test,
                                    const ImportanceProfile& vtf_profile, double threshold,
                                    const IndependentModelSpec& spec);

struct ComparisonReport {
  std::string dataset_hash;
  std::vector<SelectionCurve> methods;
  std::optional<OneShotSelection> vtf_selection;
};

// One curve per profile; adds the one-shot selection when a VTF profile is
// among the inputs.
ComparisonReport compare_methods(const Dataset& train, const Dataset& test,
                                 const std::vector<ImportanceProfile>& profiles,
                                 const IndependentModelSpec& spec,
                                 double threshold = 1.0,
                                 const std::vector<double>& fractions = default_fractions());

nlohmann::json curve_to_json(const SelectionCurve& c);
SelectionCurve curve_from_json(const nlohmann::json& doc);
nlohmann::json report_to_json(const ComparisonReport& r);
// method,fraction,removed,metric rows; the baseline appears as fraction 0.
std::string report_to_csv(const ComparisonReport& r);
std::string report_to_svg(const ComparisonReport& r);

}  // namespace vtf
