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

#include "vtf/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vtf/baselines.hpp"
#include "vtf/cf.hpp"
#include "vtf/errors.hpp"
#include "vtf/evaluation.hpp"
#include "vtf/model_io.hpp"
#include "vtf/svg.hpp"
#include "vtf/vtf.hpp"

namespace vtf::cli {

namespace {

using nlohmann::json;

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'" +
                  (ec ? ": " + ec.message() : std::string{}));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  ensure_out_dir(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& doc) {
  ensure_out_dir(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  write_json_file(path, doc);
}

json read_artifact(const std::filesystem::path& path, const char* produced_by) {
  if (!std::filesystem::exists(path)) {
    throw IoError("missing '" + path.string() + "'; run '" + produced_by + "' first");
  }
  return read_json_file(path);
}

std::string provenance_line(const Workspace& ws) {
  return std::string("vtf ") + kToolVersion + " config " + ws.config_digest + " dataset " +
         ws.dataset_hash;
}

double test_metric(const LayeredModel& model, const Dataset& test) {
  const Vector pred = forward(model, test.features).col(0);
  if (test.task == TaskKind::kBinaryClassification) {
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      if ((pred(i) >= 0.5 ? 1.0 : 0.0) == test.target(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
  }
  return (pred - test.target).squaredNorm() / static_cast<double>(pred.size());
}

const char* metric_name(TaskKind task) {
  return task == TaskKind::kBinaryClassification ? "accuracy" : "mse";
}

std::size_t retrain_count(const Workspace& ws) {
  return ws.config.n_retrains > 0 ? ws.config.n_retrains
                                  : default_retrain_count(ws.train.num_features());
}

void write_profile(const Workspace& ws, const ImportanceProfile& p) {
  json doc = profile_to_json(p);
  doc["provenance"] = ws.provenance();
  write_json(ws.out("profile_" + p.name + ".json"), doc);
  write_text(ws.out("profile_" + p.name + ".csv"),
             "# " + provenance_line(ws) + "\n" + profile_to_csv(p));
  std::vector<svg::Bar> bars;
  for (std::size_t j = 0; j < p.feature_names.size(); ++j) {
    bars.push_back({p.feature_names[j], p.scores(static_cast<Eigen::Index>(j))});
  }
  write_text(ws.out("profile_" + p.name + ".svg"),
             svg::bar_chart(bars, p.name + " (" + std::string(to_string(p.direction)) + ")",
                            provenance_line(ws)));
}

}  // namespace

json Workspace::provenance() const {
  return {{"tool_version", kToolVersion},
          {"config_digest", config_digest},
          {"dataset_hash", dataset_hash}};
}

Workspace open_workspace(const RunConfig& config) {
  config.validate();
  if (config.dataset.path.empty()) throw ConfigError("no dataset path configured (use --data)");
  Workspace ws;
  ws.config = config;
  ws.full = load_csv(config.dataset.path, config.dataset.schema);
  ws.full.validate();
  ws.dataset_hash = dataset_hash(ws.full);
  ws.config_digest = config_digest(config);
  auto [tr, te] = split(ws.full, config.dataset.split_ratio, config.seed);
  if (config.dataset.standardize) {
    std::tie(ws.train, ws.test) = standardize(tr, te);
  } else {
    ws.train = std::move(tr);
    ws.test = std::move(te);
  }
  return ws;
}

LayeredModel read_base_model(const Workspace& ws) {
  LayeredModel m = model_from_json(read_artifact(ws.out(kBaseModelFile), "train-base"));
  if (m.input_dim() != ws.train.num_features()) {
    throw SchemaError("base model expects " + std::to_string(m.input_dim()) +
                      " features but the dataset has " + std::to_string(ws.train.num_features()));
  }
  return m;
}

WeightMatrix read_weights(const Workspace& ws) {
  WeightMatrix wm = weight_matrix_from_json(read_artifact(ws.out(kWeightsFile), "explore"));
  if (wm.feature_names != ws.train.feature_names) {
    throw SchemaError("weight matrix feature names do not match the dataset");
  }
  return wm;
}

ImportanceProfile compute_profile(const Workspace& ws, const std::string& method) {
  const Method m = method_from_string(method);
  switch (m) {
    case Method::kVtf:
      return vtf_scores(read_weights(ws).rows(), ws.train.feature_names);
    case Method::kRvtw:
      return rvtw_scores(read_weights(ws).rows(), ws.train.feature_names);
    case Method::kCf: {
      const WeightMatrix wm = read_weights(ws);
      const LayeredModel base = read_base_model(ws);
      return cf_profile(wm, base, ws.test.ref());
    }
    case Method::kPermutation:
      return permutation_importance(read_base_model(ws), ws.test.ref(), ws.test.feature_names,
                                    ws.config.permutation_repeats, ws.config.seed);
    case Method::kConnectionWeights:
      return connection_weights(read_base_model(ws), ws.train.feature_names);
    case Method::kFisherScore:
      if (ws.train.task != TaskKind::kBinaryClassification) {
        throw ArgumentError("fisher score needs a classification dataset");
      }
      return fisher_score(ws.train);
    case Method::kExternal:
      break;
  }
  throw ConfigError("method '" + method + "' cannot be computed; pass rankings as external CSVs");
}

int cmd_train_base(const Workspace& ws, std::ostream& out) {
  ensure_out_dir(ws.config.out_dir);
  const bool classification = ws.train.task == TaskKind::kBinaryClassification;
  LayeredModel model = make_model(ws.config.base_model.family, ws.train.num_features(),
                                  ws.config.base_model.hidden, classification, ws.config.seed);
  TrainConfig tc = ws.config.train;
  tc.batch_size = std::min(tc.batch_size, ws.train.num_samples());
  const TrainHistory h = train(model, ws.train.ref(), ws.test.ref(), tc);

  json doc = model_to_json(model);
  doc["provenance"] = ws.provenance();
  write_json(ws.out(kBaseModelFile), doc);

  std::ostringstream hist;
  hist.precision(17);
  hist << "# " << provenance_line(ws) << "\nepoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
    hist << e + 1 << ',' << h.train_loss[e] << ',' << h.val_loss[e] << '\n';
  }
  write_text(ws.out(kBaseHistoryFile), hist.str());

  const double metric = test_metric(model, ws.test);
  write_json(ws.out(kBaseMetricsFile), {{"provenance", ws.provenance()},
                                        {"config", config_to_json(ws.config)},
                                        {"train_loss", h.final_loss},
                                        {"test_metric", metric},
                                        {"metric", metric_name(ws.test.task)},
                                        {"epochs", h.train_loss.size()}});
  out << "base model: " << to_string(ws.config.base_model.family) << ", train loss "
      << h.final_loss << ", test " << metric_name(ws.test.task) << ' ' << metric << '\n'
      << "wrote " << ws.out(kBaseModelFile).string() << '\n';
  return 0;
}

int cmd_explore(const Workspace& ws, std::ostream& out, std::ostream& err) {
  const LayeredModel base = freeze(read_base_model(ws));
  RashomonConfig rc = ws.config.rashomon;
  rc.n_retrains = retrain_count(ws);
  rc.base_seed = ws.config.seed;
  std::size_t done = 0;
  const WeightMatrix wm =
      explore(base, ws.train.ref(), ws.train.feature_names, rc, [&](const RetrainRecord& r) {
        ++done;
        err << "retrain " << done << '/' << rc.n_retrains << " index " << r.retrain_index
            << (r.accepted ? " accepted" : " rejected") << " loss " << r.final_loss
            << " epochs " << r.epochs_used;
        if (!r.diagnostic.empty()) err << " (" << r.diagnostic << ')';
        err << '\n';
      });
  json doc = weight_matrix_to_json(wm);
  doc["provenance"] = ws.provenance();
  write_json(ws.out(kWeightsFile), doc);
  out << "accepted " << wm.num_rows() << " of " << wm.attempted << " retrains (base loss "
      << wm.base_loss << ", epsilon " << wm.epsilon << ")\n"
      << "wrote " << ws.out(kWeightsFile).string() << '\n';
  return 0;
}

int cmd_explain(const Workspace& ws, const std::string& method, std::ostream& out) {
  const ImportanceProfile p = compute_profile(ws, method);
  write_profile(ws, p);
  out << p.name << " ranking (most to least important):\n";
  for (const auto& f : ranked_features(p)) {
    out << "  " << std::setw(3) << f.rank << "  " << f.name << "  " << f.score << '\n';
  }
  return 0;
}

int cmd_select(const Workspace& ws, std::ostream& out) {
  const ImportanceProfile p = vtf_scores(read_weights(ws).rows(), ws.train.feature_names);
  const OneShotSelection s =
      one_shot_selection(ws.train, ws.test, p, ws.config.threshold, ws.config.independent);
  std::vector<std::string> retained;
  for (std::size_t j = 0; j < ws.train.num_features(); ++j) {
    if (!std::binary_search(s.removed.begin(), s.removed.end(), j)) {
      retained.push_back(ws.train.feature_names[j]);
    }
  }
  json doc = {{"provenance", ws.provenance()},
              {"config", config_to_json(ws.config)},
              {"threshold", s.threshold},
              {"metric", metric_name(ws.test.task)},
              {"unimportant", s.removed_names},
              {"retained", retained},
              {"full_metric", s.baseline_metric},
              {"retained_metric", s.metric ? json(*s.metric) : json(nullptr)}};
  if (s.removed.empty()) {
    doc["message"] = "no feature has VTF above the threshold; nothing removed";
  } else if (retained.empty()) {
    doc["message"] = "every feature is above the threshold; no subset to refit";
  }
  write_json(ws.out(kSelectionFile), doc);
  out << "threshold " << s.threshold << ": " << s.removed.size() << " unimportant feature(s)";
  for (const auto& n : s.removed_names) out << ' ' << n;
  out << '\n' << "full-feature " << metric_name(ws.test.task) << ' ' << s.baseline_metric << '\n';
  if (s.metric) {
    out << "retained-subset " << metric_name(ws.test.task) << ' ' << *s.metric << '\n';
  } else {
    out << doc["message"].get<std::string>() << '\n';
  }
  return 0;
}

int cmd_evaluate(const Workspace& ws, std::ostream& out) {
  std::vector<ImportanceProfile> profiles;
  for (const auto& m : ws.config.methods) profiles.push_back(compute_profile(ws, m));
  for (const auto& path : ws.config.external_rankings) {
    profiles.push_back(load_external_ranking(path, ws.train.feature_names));
  }
  if (profiles.empty()) throw ConfigError("evaluate: no methods or external rankings configured");
  ensure_out_dir(ws.config.out_dir);
  const ComparisonReport r = compare_methods(ws.train, ws.test, profiles, ws.config.independent,
                                             ws.config.threshold, ws.config.fractions);
  json doc = report_to_json(r);
  doc["provenance"] = ws.provenance();
  doc["config"] = config_to_json(ws.config);
  const std::string stem = kComparisonFile;
  write_json(ws.out(stem + ".json"), doc);
  write_text(ws.out(stem + ".csv"), "# " + provenance_line(ws) + "\n" + report_to_csv(r));
  write_text(ws.out(stem + ".svg"), report_to_svg(r));
  out << "fraction";
  for (const auto& c : r.methods) out << '\t' << c.method;
  out << "\n0";
  for (const auto& c : r.methods) out << '\t' << c.baseline_metric;
  out << '\n';
  for (std::size_t k = 0; k < ws.config.fractions.size(); ++k) {
    out << ws.config.fractions[k];
    for (const auto& c : r.methods) {
      out << '\t';
      if (c.points[k].metric) {
        out << *c.points[k].metric;
      } else {
        out << '-';
      }
    }
    out << '\n';
  }
  return 0;
}

int cmd_report(const Workspace& ws, std::ostream& out) {
  std::ostringstream md;
  md << "# vtf report\n\n"
     << "- tool version: " << kToolVersion << "\n"
     << "- config digest: " << ws.config_digest << "\n"
     << "- dataset hash: " << ws.dataset_hash << "\n"
     << "- dataset: " << ws.config.dataset.path.generic_string() << " (" << ws.full.num_samples()
     << " rows, " << ws.full.num_features() << " features, "
     << to_string(ws.full.task) << ")\n\n";
  bool any = false;
  if (std::filesystem::exists(ws.out(kBaseMetricsFile))) {
    const json m = read_json_file(ws.out(kBaseMetricsFile));
    md << "## Base model\n\n"
       << "train loss " << m.at("train_loss").get<double>() << ", test "
       << m.at("metric").get<std::string>() << ' ' << m.at("test_metric").get<double>()
       << "\n\n";
    any = true;
  }
  if (std::filesystem::exists(ws.out(kWeightsFile))) {
    const json w = read_json_file(ws.out(kWeightsFile));
    md << "## Rashomon exploration\n\n"
       << w.at("records").size() << " accepted of " << w.at("attempted").get<std::size_t>()
       << " retrains, base loss " << w.at("base_loss").get<double>() << ", epsilon "
       << w.at("epsilon").get<double>() << "\n\n";
    any = true;
  }
  for (const char* name : {"vtf", "rvtw", "cf", "permutation", "cw", "fisher"}) {
    const auto path = ws.out(std::string("profile_") + name + ".json");
    if (!std::filesystem::exists(path)) continue;
    const ImportanceProfile p = profile_from_json(read_json_file(path));
    md << "## Profile: " << p.name << "\n\n| rank | feature | score |\n|---|---|---|\n";
    for (const auto& f : ranked_features(p)) {
      md << "| " << f.rank << " | " << f.name << " | " << f.score << " |\n";
    }
    md << '\n';
    any = true;
  }
  if (std::filesystem::exists(ws.out(kSelectionFile))) {
    const json s = read_json_file(ws.out(kSelectionFile));
    md << "## Selection (VTF > " << s.at("threshold").get<double>() << ")\n\n"
       << "unimportant: " << s.at("unimportant").dump() << "\n\n"
       << "full " << s.at("metric").get<std::string>() << ' '
       << s.at("full_metric").get<double>() << ", retained subset "
       << (s.at("retained_metric").is_null() ? std::string("n/a")
                                             : std::to_string(s.at("retained_metric").get<double>()))
       << "\n\n";
    any = true;
  }
  const auto comparison = ws.out(std::string(kComparisonFile) + ".json");
  if (std::filesystem::exists(comparison)) {
    const json c = read_json_file(comparison);
    md << "## Drop-and-refit comparison\n\n| fraction |";
    for (const auto& m : c.at("methods")) md << ' ' << m.at("name").get<std::string>() << " |";
    md << "\n|---|";
    for (std::size_t k = 0; k < c.at("methods").size(); ++k) md << "---|";
    md << '\n';
    const auto& first = c.at("methods").at(0).at("curve");
    for (std::size_t k = 0; k < first.size(); ++k) {
      md << "| " << first.at(k).at("fraction").get<double>() << " |";
      for (const auto& m : c.at("methods")) {
        const json& v = m.at("curve").at(k).at("metric");
        md << ' ' << (v.is_null() ? std::string("-") : std::to_string(v.get<double>())) << " |";
      }
      md << '\n';
    }
    md << '\n';
    any = true;
  }
  if (!any) md << "No artifacts found in " << ws.config.out_dir.generic_string() << ".\n";
  write_text(ws.out(kReportFile), md.str());
  out << "wrote " << ws.out(kReportFile).string() << '\n';
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature importance from Rashomon-set mask retraining"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::optional<std::string> data, out_dir, target, task, family;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs, epochs;
  std::optional<std::vector<std::size_t>> hidden;
  std::optional<bool> no_standardize;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_option("--data", data, "Dataset CSV");
  app.add_option("--target", target, "Target column name (index without header)");
  app.add_option("--task", task, "regression or binary_classification");
  app.add_option("--family", family, "Base model family: linear, logistic or mlp");
  app.add_option("--hidden", hidden, "Hidden layer widths for mlp");
  app.add_option("--epochs", epochs, "Base model training epochs");
  app.add_option("-o,--out-dir", out_dir, "Output directory");
  app.add_option("--seed", seed, "Global seed (overrides VTF_SEED and the config)");
  app.add_option("-j,--jobs", jobs, "Worker threads for exploration")->check(CLI::PositiveNumber);
  app.add_flag("--no-standardize", no_standardize, "Use raw feature scales");

  auto* train_base = app.add_subcommand("train-base", "Train and store the base model");
  auto* explore_cmd = app.add_subcommand("explore", "Collect Rashomon-set mask vectors");
  std::optional<std::size_t> n_retrains;
  std::optional<double> epsilon;
  explore_cmd->add_option("-n,--n-retrains", n_retrains, "Number of retrains")
      ->check(CLI::PositiveNumber);
  explore_cmd->add_option("--epsilon", epsilon, "Loss tolerance")->check(CLI::NonNegativeNumber);

  auto* explain_cmd = app.add_subcommand("explain", "Score features with one method");
  std::string method;
  explain_cmd->add_option("method", method, "vtf, rvtw, cf, permutation, cw or fisher")
      ->required()
      ->check(CLI::IsMember({"vtf", "rvtw", "cf", "permutation", "cw", "fisher"}));

  auto* select_cmd = app.add_subcommand("select", "Drop features with VTF above a threshold");
  std::optional<double> threshold;
  select_cmd->add_option("-t,--threshold", threshold, "VTF threshold")
      ->check(CLI::PositiveNumber);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Drop-and-refit comparison");
  std::optional<std::vector<std::string>> methods;
  std::vector<std::string> external;
  evaluate_cmd->add_option("-m,--methods", methods, "Methods to compare")
      ->check(CLI::IsMember({"vtf", "rvtw", "cf", "permutation", "cw", "fisher"}));
  evaluate_cmd->add_option("--external", external, "External ranking CSV (name,rank)");

  auto* report_cmd = app.add_subcommand("report", "Summarize stored artifacts");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(kToolVersion) + "\n" : app.help());
      return 0;
    }
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return static_cast<int>(ExitCode::kIoOrConfig);
  }

  try {
    RunConfig config = config_path.empty() ? config_from_json(json::object())
                                           : load_config(config_path);
    if (const auto env = seed_from_env()) config.seed = *env;
    if (seed) config.seed = *seed;
    if (data) config.dataset.path = *data;
    if (target) config.dataset.schema.target_column = *target;
    if (task) config.dataset.schema.task = task_kind_from_string(*task);
    if (family) {
      config.base_model.family = model_family_from_string(*family);
      config.independent.family = config.base_model.family;
    }
    if (hidden) {
      config.base_model.hidden = *hidden;
      config.independent.hidden = *hidden;
    }
    if (epochs) config.train.epochs = *epochs;
    if (no_standardize && *no_standardize) config.dataset.standardize = false;
    if (out_dir) config.out_dir = *out_dir;
    if (jobs) config.rashomon.jobs = *jobs;
    if (n_retrains) config.n_retrains = *n_retrains;
    if (epsilon) config.rashomon.epsilon.value = *epsilon;
    if (threshold) config.threshold = *threshold;
    if (methods) config.methods = *methods;
    for (const auto& e : external) config.external_rankings.emplace_back(e);
    config.apply_seed();

    const Workspace ws = open_workspace(config);
    if (train_base->parsed()) return cmd_train_base(ws, out);
    if (explore_cmd->parsed()) return cmd_explore(ws, out, err);
    if (explain_cmd->parsed()) return cmd_explain(ws, method, out);
    if (select_cmd->parsed()) return cmd_select(ws, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ws, out);
    if (report_cmd->parsed()) return cmd_report(ws, out);
    err << "no command given\n";
    return static_cast<int>(ExitCode::kIoOrConfig);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed artifact: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kIoOrConfig);
  }
}

}  // namespace vtf::cli
