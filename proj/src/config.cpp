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

#include "vtf/config.hpp"

#include <charconv>
#include <cstdlib>
#include <set>

#include "vtf/errors.hpp"
#include "vtf/hash.hpp"
#include "vtf/importance.hpp"
#include "vtf/model_io.hpp"

namespace vtf {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

const std::set<std::string> kMethodNames = {"vtf",         "rvtw", "cf", "permutation",
                                            "cw",          "fisher"};

}  // namespace

void RunConfig::apply_seed() {
  train.seed = seed;
  rashomon.base_seed = seed;
  independent.train.seed = seed;
}

void RunConfig::validate() const {
  try {
    train.validate();
    rashomon.validate();
    independent.train.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(dataset.split_ratio > 0.0 && dataset.split_ratio < 1.0)) {
    throw ConfigError("config: dataset.split_ratio must lie in (0, 1)");
  }
  if (!(threshold > 0.0)) throw ConfigError("config: threshold must be > 0");
  if (permutation_repeats < 1) throw ConfigError("config: permutation_repeats must be >= 1");
  for (const auto& m : methods) {
    if (!kMethodNames.contains(m)) throw ConfigError("config: unknown method '" + m + "'");
  }
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("config: fractions must lie in (0, 1)");
  }
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  try {
    reject_unknown(doc,
                   {"seed", "out_dir", "dataset", "base_model", "train", "rashomon", "methods",
                    "evaluation", "permutation_repeats"},
                   "");
    read(doc, "seed", c.seed);
    if (doc.contains("out_dir")) c.out_dir = doc.at("out_dir").get<std::string>();
    read(doc, "methods", c.methods);
    read(doc, "permutation_repeats", c.permutation_repeats);

    if (doc.contains("dataset")) {
      const json& d = doc.at("dataset");
      reject_unknown(d, {"path", "target_column", "has_header", "task", "standardize",
                         "split_ratio"},
                     "dataset");
      if (d.contains("path")) c.dataset.path = d.at("path").get<std::string>();
      read(d, "target_column", c.dataset.schema.target_column);
      read(d, "has_header", c.dataset.schema.has_header);
      if (d.contains("task")) c.dataset.schema.task = task_kind_from_string(d.at("task").get<std::string>());
      read(d, "standardize", c.dataset.standardize);
      read(d, "split_ratio", c.dataset.split_ratio);
    }
    if (doc.contains("base_model")) {
      const json& b = doc.at("base_model");
      reject_unknown(b, {"family", "hidden"}, "base_model");
      if (b.contains("family")) c.base_model.family = model_family_from_string(b.at("family").get<std::string>());
      read(b, "hidden", c.base_model.hidden);
    }
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      reject_unknown(t, {"epochs", "batch_size", "learning_rate", "l2_lambda"}, "train");
      read(t, "epochs", c.train.epochs);
      read(t, "batch_size", c.train.batch_size);
      read(t, "learning_rate", c.train.learning_rate);
      read(t, "l2_lambda", c.train.l2_lambda);
    }
    if (doc.contains("rashomon")) {
      const json& r = doc.at("rashomon");
      reject_unknown(r, {"epsilon", "epsilon_mode", "max_epochs_per_retrain", "n_retrains",
                         "batch_size", "learning_rate", "l2_lambda", "jobs"},
                     "rashomon");
      read(r, "epsilon", c.rashomon.epsilon.value);
      if (r.contains("epsilon_mode")) {
        const auto mode = r.at("epsilon_mode").get<std::string>();
        if (mode == "relative") {
          c.rashomon.epsilon.mode = Tolerance::Mode::kRelative;
        } else if (mode == "absolute") {
          c.rashomon.epsilon.mode = Tolerance::Mode::kAbsolute;
        } else {
          throw ConfigError("config: rashomon.epsilon_mode must be 'relative' or 'absolute'");
        }
      }
      read(r, "max_epochs_per_retrain", c.rashomon.max_epochs_per_retrain);
      read(r, "n_retrains", c.n_retrains);
      read(r, "batch_size", c.rashomon.train_config.batch_size);
      read(r, "learning_rate", c.rashomon.train_config.learning_rate);
      read(r, "l2_lambda", c.rashomon.train_config.l2_lambda);
      read(r, "jobs", c.rashomon.jobs);
    }
    c.independent.family = c.base_model.family;
    c.independent.hidden = c.base_model.hidden;
    if (doc.contains("evaluation")) {
      const json& e = doc.at("evaluation");
      reject_unknown(e, {"family", "hidden", "epochs", "batch_size", "learning_rate", "fractions",
                         "external_rankings", "threshold"},
                     "evaluation");
      if (e.contains("family")) c.independent.family = model_family_from_string(e.at("family").get<std::string>());
      read(e, "hidden", c.independent.hidden);
      read(e, "epochs", c.independent.train.epochs);
      read(e, "batch_size", c.independent.train.batch_size);
      read(e, "learning_rate", c.independent.train.learning_rate);
      read(e, "fractions", c.fractions);
      read(e, "threshold", c.threshold);
      if (e.contains("external_rankings")) {
        for (const auto& p : e.at("external_rankings")) c.external_rankings.emplace_back(p.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.apply_seed();
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  std::vector<std::string> external;
  for (const auto& p : c.external_rankings) external.push_back(p.generic_string());
  return {
      {"seed", c.seed},
      {"out_dir", c.out_dir.generic_string()},
      {"dataset",
       {{"path", c.dataset.path.generic_string()},
        {"target_column", c.dataset.schema.target_column},
        {"has_header", c.dataset.schema.has_header},
        {"task", std::string(to_string(c.dataset.schema.task))},
        {"standardize", c.dataset.standardize},
        {"split_ratio", c.dataset.split_ratio}}},
      {"base_model",
       {{"family", std::string(to_string(c.base_model.family))}, {"hidden", c.base_model.hidden}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"l2_lambda", c.train.l2_lambda}}},
      {"rashomon",
       {{"epsilon", c.rashomon.epsilon.value},
        {"epsilon_mode",
         c.rashomon.epsilon.mode == Tolerance::Mode::kRelative ? "relative" : "absolute"},
        {"max_epochs_per_retrain", c.rashomon.max_epochs_per_retrain},
        {"n_retrains", c.n_retrains},
        {"batch_size", c.rashomon.train_config.batch_size},
        {"learning_rate", c.rashomon.train_config.learning_rate},
        {"l2_lambda", c.rashomon.train_config.l2_lambda},
        {"jobs", c.rashomon.jobs}}},
      {"methods", c.methods},
      {"evaluation",
       {{"family", std::string(to_string(c.independent.family))},
        {"hidden", c.independent.hidden},
        {"epochs", c.independent.train.epochs},
        {"batch_size", c.independent.train.batch_size},
        {"learning_rate", c.independent.train.learning_rate},
        {"fractions", c.fractions},
        {"external_rankings", external},
        {"threshold", c.threshold}}},
      {"permutation_repeats", c.permutation_repeats},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path));
}

std::string config_digest(const RunConfig& config) {
  json doc = config_to_json(config);
  // jobs and out_dir are left out of the digest.
  doc["rashomon"].erase("jobs");
  doc.erase("out_dir");
  Fnv1a h;
  h.update(doc.dump());
  return h.hex();
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("VTF_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string_view text(raw);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("VTF_SEED must be an unsigned integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace vtf
