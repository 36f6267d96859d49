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

#include "vtf/rashomon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "vtf/errors.hpp"
#include "vtf/mask_model.hpp"

namespace vtf {

bool in_rashomon(double loss, double base_loss, double epsilon) {
  return loss <= base_loss + epsilon;
}

void RashomonConfig::validate() const {
  if (!(epsilon.value >= 0.0)) throw ArgumentError("RashomonConfig: epsilon must be >= 0");
  if (n_retrains < 1) throw ArgumentError("RashomonConfig: n_retrains must be >= 1");
  if (max_epochs_per_retrain < 1) {
    throw ArgumentError("RashomonConfig: max_epochs_per_retrain must be >= 1");
  }
  TrainConfig tc = train_config;
  tc.epochs = max_epochs_per_retrain;
  tc.validate();
}

std::size_t default_retrain_count(std::size_t num_features) {
  const std::size_t floor = num_features <= 30 ? 250 : 0;
  return std::max(num_features + 10, floor);
}

Matrix WeightMatrix::rows() const {
  Matrix m(static_cast<Eigen::Index>(records.size()),
           static_cast<Eigen::Index>(feature_names.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = records[i].final_mask.transpose();
  }
  return m;
}

RetrainRecord retrain_once(const LayeredModel& base, DataRef train_set, double base_loss,
                           const RashomonConfig& config, std::uint64_t seed,
                           std::size_t retrain_index) {
  config.validate();
  const double epsilon = config.epsilon.resolve(base_loss);
  RetrainRecord record;
  record.retrain_index = retrain_index;
  record.seed = seed;

  FeatureModel fm = build_feature_model(base, seed);
  TrainConfig tc = config.train_config;
  tc.epochs = config.max_epochs_per_retrain;
  tc.seed = seed;
  try {
    const MaskTrainResult r = train_mask(fm, train_set, tc, [&](std::size_t, double loss) {
      return in_rashomon(loss, base_loss, epsilon);
    });
    record.final_loss = r.history.final_loss;
    record.epochs_used = r.epochs_used;
    record.accepted = in_rashomon(record.final_loss, base_loss, epsilon);
    if (!record.accepted) {
      record.diagnostic = "loss target not reached within " +
                          std::to_string(config.max_epochs_per_retrain) + " epochs";
    }
  } catch (const TrainingError& e) {
    record.accepted = false;
    record.final_loss = std::nan("");
    record.epochs_used = static_cast<std::size_t>(e.last_finite_epoch() + 1);
    record.diagnostic = e.what();
  }
  record.final_mask = fm.mask.weights;
  return record;
}

WeightMatrix explore(const LayeredModel& base, DataRef train_set,
                     const std::vector<std::string>& feature_names,
                     const RashomonConfig& config, const ProgressFn& progress) {
  config.validate();
  if (feature_names.size() != base.input_dim()) {
    throw ShapeError("explore: " + std::to_string(feature_names.size()) + " names for " +
                     std::to_string(base.input_dim()) + " model inputs");
  }
  const double base_loss = loss(forward(base, train_set.x).col(0), train_set.y, base.loss_kind());
  const double epsilon = config.epsilon.resolve(base_loss);

  std::vector<RetrainRecord> records(config.n_retrains);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < config.n_retrains; i = next.fetch_add(1)) {
      records[i] = retrain_once(base, train_set, base_loss, config, config.base_seed + i, i);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(records[i]);
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, config.n_retrains);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  WeightMatrix wm;
  wm.base_loss = base_loss;
  wm.epsilon = epsilon;
  wm.feature_names = feature_names;
  wm.attempted = config.n_retrains;
  std::ostringstream failures;
  for (auto& r : records) {
    if (r.accepted) {
      // Replay through the plain base forward pass.
      const Matrix pred = forward(base, apply_mask(r.final_mask, train_set.x));
      const double replay = loss(pred.col(0), train_set.y, base.loss_kind());
      if (!in_rashomon(replay, base_loss, epsilon)) {
        r.accepted = false;
        r.diagnostic = "replayed loss outside the Rashomon set";
      }
    }
    if (r.accepted) {
      wm.records.push_back(std::move(r));
    } else {
      failures << "\n  retrain " << r.retrain_index << " (seed " << r.seed
               << "): " << r.diagnostic;
    }
  }
  if (wm.records.empty()) {
    throw ExplorationError("explore: no retrain reached the Rashomon set" + failures.str());
  }
  return wm;
}

Matrix stability_curve(const Matrix& weights) {
  if (weights.rows() < 1) throw ArgumentError("stability_curve: need at least one row");
  Matrix curve(weights.rows(), weights.cols());
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(weights.cols());
  for (Eigen::Index k = 0; k < weights.rows(); ++k) {
    sum += weights.row(k);
    curve.row(k) = sum / static_cast<double>(k + 1);
  }
  return curve;
}

nlohmann::json weight_matrix_to_json(const WeightMatrix& wm) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : wm.records) {
    records.push_back({
        {"index", r.retrain_index},
        {"seed", r.seed},
        {"final_loss", r.final_loss},
        {"epochs_used", r.epochs_used},
        {"mask", std::vector<double>(r.final_mask.begin(), r.final_mask.end())},
    });
  }
  return {
      {"base_loss", wm.base_loss},
      {"epsilon", wm.epsilon},
      {"feature_names", wm.feature_names},
      {"attempted", wm.attempted},
      {"records", std::move(records)},
  };
}

WeightMatrix weight_matrix_from_json(const nlohmann::json& doc) {
  try {
    WeightMatrix wm;
    wm.base_loss = doc.at("base_loss").get<double>();
    wm.epsilon = doc.at("epsilon").get<double>();
    wm.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    for (const auto& entry : doc.at("records")) {
      RetrainRecord r;
      r.retrain_index = entry.at("index").get<std::size_t>();
      r.seed = entry.at("seed").get<std::uint64_t>();
      r.final_loss = entry.at("final_loss").get<double>();
      r.epochs_used = entry.at("epochs_used").get<std::size_t>();
      const auto mask = entry.at("mask").get<std::vector<double>>();
      if (mask.size() != wm.feature_names.size()) {
        throw SchemaError("weight matrix json: record " + std::to_string(r.retrain_index) +
                          " has " + std::to_string(mask.size()) + " mask entries");
      }
      r.final_mask = Eigen::Map<const Vector>(mask.data(), static_cast<Eigen::Index>(mask.size()));
      r.accepted = true;
      wm.records.push_back(std::move(r));
    }
    wm.attempted = doc.value("attempted", wm.records.size());
    return wm;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("weight matrix json: ") + e.what());
  }
}

WeightMatrix weight_matrix_from_rows(const Matrix& rows, std::vector<std::string> names) {
  if (static_cast<std::size_t>(rows.cols()) != names.size()) {
    throw ShapeError("weight_matrix_from_rows: " + std::to_string(rows.cols()) +
                     " columns but " + std::to_string(names.size()) + " names");
  }
  WeightMatrix wm;
  wm.feature_names = std::move(names);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    RetrainRecord r;
    r.retrain_index = static_cast<std::size_t>(i);
    r.final_mask = rows.row(i).transpose();
    r.accepted = true;
    wm.records.push_back(std::move(r));
  }
  wm.attempted = wm.records.size();
  return wm;
}

}  // namespace vtf
