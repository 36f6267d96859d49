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

#include "vtf/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "vtf/errors.hpp"
#include "vtf/svg.hpp"
#include "vtf/vtf.hpp"

namespace vtf {

std::vector<double> default_fractions() {
  std::vector<double> out;
  for (int k = 1; k <= 9; ++k) out.push_back(k / 10.0);
  return out;
}

std::size_t drop_count(std::size_t num_features, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ArgumentError("drop fraction must lie in [0, 1], got " + std::to_string(fraction));
  }
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(num_features) + 1e-9));
}

DroppedFeatures drop_columns(const Dataset& data, const std::vector<std::size_t>& removed) {
  const std::size_t d = data.num_features();
  std::vector<bool> drop(d, false);
  for (std::size_t j : removed) {
    if (j >= d) throw ArgumentError("drop: feature index " + std::to_string(j) + " out of range");
    drop[j] = true;
  }
  DroppedFeatures out;
  for (std::size_t j = 0; j < d; ++j) (drop[j] ? out.removed : out.kept).push_back(j);
  if (out.kept.empty()) throw ArgumentError("drop: removing every feature leaves nothing to fit");
  out.data = select_columns(data, out.kept);
  return out;
}

DroppedFeatures drop_features(const Dataset& data, const std::vector<std::size_t>& ranking,
                              double fraction) {
  const std::size_t d = data.num_features();
  if (ranking.size() != d) {
    throw ShapeError("drop: ranking has " + std::to_string(ranking.size()) +
                     " entries for " + std::to_string(d) + " features");
  }
  const std::size_t k = drop_count(d, fraction);
  if (k >= d) {
    throw ArgumentError("drop: fraction " + std::to_string(fraction) + " removes all " +
                        std::to_string(d) + " features");
  }
  return drop_columns(data, std::vector<std::size_t>(ranking.end() - static_cast<std::ptrdiff_t>(k),
                                                     ranking.end()));
}

bool metric_higher_is_better(TaskKind task) { return task == TaskKind::kBinaryClassification; }

double independent_fit(const Dataset& train_set, const Dataset& test_set,
                       const IndependentModelSpec& spec) {
  if (train_set.num_features() != test_set.num_features()) {
    throw ShapeError("independent_fit: train and test feature counts differ");
  }
  const bool classification = train_set.task == TaskKind::kBinaryClassification;
  LayeredModel model = make_model(spec.family, train_set.num_features(), spec.hidden,
                                  classification, spec.train.seed);
  TrainConfig cfg = spec.train;
  cfg.batch_size = std::min(cfg.batch_size, train_set.num_samples());
  train(model, train_set.ref(), std::nullopt, cfg);
  const Vector pred = forward(model, test_set.features).col(0);
  if (classification) {
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      const double label = pred(i) >= 0.5 ? 1.0 : 0.0;
      if (label == test_set.target(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
  }
  return (pred - test_set.target).squaredNorm() / static_cast<double>(pred.size());
}

SelectionCurve selection_curve(const Dataset& train_set, const Dataset& test_set,
                               const ImportanceProfile& profile, const IndependentModelSpec& spec,
                               const std::vector<double>& fractions) {
  const auto start = std::chrono::steady_clock::now();
  SelectionCurve curve;
  curve.method = profile.name;
  curve.spec = spec;
  curve.higher_is_better = metric_higher_is_better(train_set.task);
  curve.baseline_metric = independent_fit(train_set, test_set, spec);
  for (double f : fractions) {
    CurvePoint pt;
    pt.fraction = f;
    try {
      const DroppedFeatures tr = drop_features(train_set, profile.ranking, f);
      const DroppedFeatures te = drop_columns(test_set, tr.removed);
      pt.removed = tr.removed.size();
      pt.metric = independent_fit(tr.data, te.data, spec);
    } catch (const Error& e) {
      pt.error = e.what();
    }
    curve.points.push_back(std::move(pt));
  }
  curve.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return curve;
}

OneShotSelection one_shot_selection(const Dataset& train_set, const Dataset& test_set,
                                    const ImportanceProfile& vtf_profile, double threshold,
                                    const IndependentModelSpec& spec) {
  OneShotSelection out;
  out.threshold = threshold;
  out.removed = select_unimportant(vtf_profile, threshold);
  for (std::size_t j : out.removed) out.removed_names.push_back(train_set.feature_names[j]);
  out.baseline_metric = independent_fit(train_set, test_set, spec);
  if (!out.removed.empty() && out.removed.size() < train_set.num_features()) {
    const DroppedFeatures tr = drop_columns(train_set, out.removed);
    const DroppedFeatures te = drop_columns(test_set, out.removed);
    out.metric = independent_fit(tr.data, te.data, spec);
  }
  return out;
}

ComparisonReport compare_methods(const Dataset& train_set, const Dataset& test_set,
                                 const std::vector<ImportanceProfile>& profiles,
                                 const IndependentModelSpec& spec, double threshold,
                                 const std::vector<double>& fractions) {
  if (profiles.empty()) throw ArgumentError("compare_methods: no importance profiles given");
  ComparisonReport r;
  r.dataset_hash = dataset_hash(train_set);
  for (const auto& p : profiles) {
    if (p.feature_names != train_set.feature_names) {
      throw ShapeError("compare_methods: profile '" + p.name +
                       "' does not match the dataset feature names");
    }
    r.methods.push_back(selection_curve(train_set, test_set, p, spec, fractions));
    if (p.method == Method::kVtf && !r.vtf_selection) {
      r.vtf_selection = one_shot_selection(train_set, test_set, p, threshold, spec);
    }
  }
  return r;
}

namespace {

nlohmann::json spec_to_json(const IndependentModelSpec& s) {
  return {{"family", std::string(to_string(s.family))},
          {"hidden", s.hidden},
          {"epochs", s.train.epochs},
          {"batch_size", s.train.batch_size},
          {"learning_rate", s.train.learning_rate},
          {"seed", s.train.seed}};
}

IndependentModelSpec spec_from_json(const nlohmann::json& j) {
  IndependentModelSpec s;
  s.family = model_family_from_string(j.at("family").get<std::string>());
  s.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  s.train.epochs = j.at("epochs").get<std::size_t>();
  s.train.batch_size = j.at("batch_size").get<std::size_t>();
  s.train.learning_rate = j.at("learning_rate").get<double>();
  s.train.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

nlohmann::json curve_to_json(const SelectionCurve& c) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : c.points) {
    nlohmann::json pt = {{"fraction", p.fraction}, {"removed", p.removed}};
    pt["metric"] = p.metric ? nlohmann::json(*p.metric) : nlohmann::json(nullptr);
    if (!p.error.empty()) pt["error"] = p.error;
    points.push_back(std::move(pt));
  }
  return {{"name", c.method},
          {"baseline", c.baseline_metric},
          {"higher_is_better", c.higher_is_better},
          {"independent_model", spec_to_json(c.spec)},
          {"curve", std::move(points)},
          {"wall_time_ms", c.wall_time_ms}};
}

SelectionCurve curve_from_json(const nlohmann::json& doc) {
  try {
    SelectionCurve c;
    c.method = doc.at("name").get<std::string>();
    c.baseline_metric = doc.at("baseline").get<double>();
    c.higher_is_better = doc.at("higher_is_better").get<bool>();
    c.spec = spec_from_json(doc.at("independent_model"));
    c.wall_time_ms = doc.value("wall_time_ms", 0.0);
    for (const auto& pt : doc.at("curve")) {
      CurvePoint p;
      p.fraction = pt.at("fraction").get<double>();
      p.removed = pt.at("removed").get<std::size_t>();
      if (!pt.at("metric").is_null()) p.metric = pt.at("metric").get<double>();
      p.error = pt.value("error", std::string{});
      c.points.push_back(std::move(p));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("selection curve: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("selection curve: ") + e.what());
  }
}

nlohmann::json report_to_json(const ComparisonReport& r) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& c : r.methods) methods.push_back(curve_to_json(c));
  nlohmann::json doc = {{"dataset_hash", r.dataset_hash}, {"methods", std::move(methods)}};
  if (r.vtf_selection) {
    const auto& s = *r.vtf_selection;
    doc["vtf_selection"] = {
        {"threshold", s.threshold},
        {"removed", s.removed},
        {"removed_names", s.removed_names},
        {"metric", s.metric ? nlohmann::json(*s.metric) : nlohmann::json(nullptr)},
        {"baseline", s.baseline_metric}};
  }
  return doc;
}

std::string report_to_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "method,fraction,removed,metric\n";
  for (const auto& c : r.methods) {
    out << c.method << ",0,0," << c.baseline_metric << '\n';
    for (const auto& p : c.points) {
      out << c.method << ',' << p.fraction << ',' << p.removed << ',';
      if (p.metric) out << *p.metric;
      out << '\n';
    }
  }
  return out.str();
}

std::string report_to_svg(const ComparisonReport& r) {
  std::vector<svg::Series> series;
  for (const auto& c : r.methods) {
    svg::Series s;
    s.name = c.method;
    s.x.push_back(0.0);
    s.y.push_back(c.baseline_metric);
    for (const auto& p : c.points) {
      s.x.push_back(p.fraction);
      s.y.push_back(p.metric ? *p.metric : std::numeric_limits<double>::quiet_NaN());
    }
    series.push_back(std::move(s));
  }
  const bool acc = !r.methods.empty() && r.methods.front().higher_is_better;
  return svg::line_chart(series, "Drop-and-refit", "fraction removed",
                         acc ? "test accuracy" : "test MSE", "dataset " + r.dataset_hash);
}

}  // namespace vtf
