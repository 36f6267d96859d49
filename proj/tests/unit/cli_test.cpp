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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vtf/cli.hpp"
#include "vtf/config.hpp"
#include "vtf/errors.hpp"
#include "vtf/svg.hpp"

namespace vtf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Config, DefaultsAndRoundTrip) {
  const RunConfig c = config_from_json(json::object());
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.threshold, 1.0);
  EXPECT_EQ(c.fractions.size(), 9u);
  EXPECT_EQ(c.rashomon.epsilon.mode, Tolerance::Mode::kRelative);
  EXPECT_DOUBLE_EQ(c.rashomon.epsilon.value, 0.01);
  const json doc = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(doc)).dump(), doc.dump());
}

TEST(Config, ParsesSections) {
  const json doc = json::parse(R"({
    "seed": 11,
    "dataset": {"path": "d.csv", "target_column": "y", "split_ratio": 0.7},
    "base_model": {"family": "mlp", "hidden": [8]},
    "rashomon": {"epsilon": 0.5, "epsilon_mode": "absolute", "jobs": 2},
    "evaluation": {"epochs": 20, "fractions": [0.2, 0.4]}
  })");
  const RunConfig c = config_from_json(doc);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.dataset.schema.target_column, "y");
  EXPECT_EQ(c.base_model.family, ModelFamily::kMlp);
  EXPECT_EQ(c.independent.family, ModelFamily::kMlp);
  EXPECT_EQ(c.independent.hidden, (std::vector<std::size_t>{8}));
  EXPECT_EQ(c.independent.train.epochs, 20u);
  EXPECT_EQ(c.rashomon.epsilon.mode, Tolerance::Mode::kAbsolute);
  EXPECT_EQ(c.rashomon.jobs, 2u);
  EXPECT_EQ(c.fractions, (std::vector<double>{0.2, 0.4}));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_from_json(json{{"sede", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"train", {{"epoch", 1}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"seed", "x"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"rashomon", {{"epsilon_mode", "loose"}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"evaluation", {{"fractions", {0.0}}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"methods", {"shap"}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"rashomon", {{"epsilon", -1.0}}}}), Error);
}

TEST(Config, SeedPropagationAndDigest) {
  RunConfig c = config_from_json(json{{"seed", 9}});
  c.apply_seed();
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.rashomon.base_seed, 9u);
  EXPECT_EQ(c.independent.train.seed, 9u);
  RunConfig d = c;
  d.rashomon.jobs = 8;
  d.out_dir = "elsewhere";
  EXPECT_EQ(config_digest(c), config_digest(d));
  d.threshold = 0.5;
  EXPECT_NE(config_digest(c), config_digest(d));
}

TEST(Config, SeedFromEnvironment) {
  ::setenv("VTF_SEED", "42", 1);
  EXPECT_EQ(seed_from_env(), std::optional<std::uint64_t>(42));
  ::setenv("VTF_SEED", "abc", 1);
  EXPECT_THROW(seed_from_env(), ConfigError);
  ::unsetenv("VTF_SEED");
  EXPECT_FALSE(seed_from_env().has_value());
}

TEST(Svg, BarChartHasOneBarPerEntry) {
  const std::string svg =
      svg::bar_chart({{"a", 1.0}, {"b<c", -0.5}, {"d", 2.0}}, "scores", "note -- here");
  EXPECT_EQ(count(svg, "<rect class=\"bar\""), 3u);
  EXPECT_NE(svg.find("b&lt;c"), std::string::npos);
  EXPECT_EQ(svg.find("note -- here"), std::string::npos);
}

TEST(Svg, LineChartLegend) {
  const double nan = std::nan("");
  const std::string svg = svg::line_chart(
      {{"one", {0.1, 0.2, 0.3}, {1.0, nan, 3.0}}, {"two", {0.1, 0.2}, {2.0, 1.0}}}, "t", "x", "y",
      "");
  EXPECT_NE(svg.find(">one<"), std::string::npos);
  EXPECT_NE(svg.find(">two<"), std::string::npos);
  EXPECT_EQ(svg::escape("a&b\"<>"), "a&amp;b&quot;&lt;&gt;");
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("VTF_SEED");
    dir_ = fs::temp_directory_path() /
           ("vtf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    std::vector<std::string> full{"--data", std::string(VTF_FIXTURE_DIR) + "/linear3.csv",
                                  "-o", dir_.string(), "--epochs", "60"};
    full.insert(full.end(), args.begin(), args.end());
    return cli::run(full, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliRun, TrainBaseIsReproducible) {
  ASSERT_EQ(run({"train-base"}), 0) << err_.str();
  const fs::path model = dir_ / cli::kBaseModelFile;
  ASSERT_TRUE(fs::exists(model));
  const std::string first = slurp(model);
  ASSERT_EQ(run({"train-base"}), 0);
  EXPECT_EQ(slurp(model), first);
  EXPECT_TRUE(json::parse(first).contains("provenance"));
  EXPECT_EQ(slurp(dir_ / cli::kBaseHistoryFile).rfind("# vtf 0.1.0 config ", 0), 0u);
}

TEST_F(CliRun, BadDatasetPathExitsTwo) {
  std::vector<std::string> args{"--data", "/no/such/file.csv", "-o", dir_.string(),
                                "train-base"};
  EXPECT_EQ(cli::run(args, out_, err_), 2);
  EXPECT_NE(err_.str().find("/no/such/file.csv"), std::string::npos);
}

TEST_F(CliRun, UnwritableOutputExitsTwo) {
  std::ofstream(dir_ / "file.txt") << "x";
  std::vector<std::string> args{"--data", std::string(VTF_FIXTURE_DIR) + "/linear3.csv",
                                "-o", (dir_ / "file.txt" / "sub").string(), "--epochs", "5",
                                "train-base"};
  EXPECT_EQ(cli::run(args, out_, err_), 2);
}

TEST_F(CliRun, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"explain", "shap"}), 2);
  EXPECT_NE(err_.str().find("usage error"), std::string::npos);
  EXPECT_EQ(run({"select", "-t", "0"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("explore"), std::string::npos);
}

TEST_F(CliRun, ExploreNeedsBaseModel) {
  EXPECT_EQ(run({"explore", "-n", "2"}), 2);
  EXPECT_NE(err_.str().find("train-base"), std::string::npos);
}

TEST_F(CliRun, InvalidSeedEnvironmentExitsTwo) {
  ::setenv("VTF_SEED", "abc", 1);
  EXPECT_EQ(run({"train-base"}), 2);
  ::unsetenv("VTF_SEED");
}

TEST_F(CliRun, FullPipeline) {
  ASSERT_EQ(run({"train-base"}), 0) << err_.str();
  const std::string base_before = slurp(dir_ / cli::kBaseModelFile);

  ASSERT_EQ(run({"explore", "-n", "4", "--epsilon", "0.5"}), 0) << err_.str();
  EXPECT_EQ(count(err_.str(), "retrain "), 4u);
  EXPECT_EQ(slurp(dir_ / cli::kBaseModelFile), base_before);
  const json weights = json::parse(slurp(dir_ / cli::kWeightsFile));
  EXPECT_EQ(weights.at("records").size(), 4u);

  ASSERT_EQ(run({"explain", "vtf"}), 0) << err_.str();
  const std::string svg = slurp(dir_ / "profile_vtf.svg");
  EXPECT_EQ(count(svg, "<rect class=\"bar\""), 3u);
  EXPECT_TRUE(fs::exists(dir_ / "profile_vtf.csv"));
  EXPECT_TRUE(json::parse(slurp(dir_ / "profile_vtf.json")).contains("provenance"));

  ASSERT_EQ(run({"explain", "permutation"}), 0) << err_.str();
  EXPECT_EQ(run({"explain", "fisher"}), 3);

  ASSERT_EQ(run({"select", "-t", "1"}), 0) << err_.str();
  const json sel = json::parse(slurp(dir_ / cli::kSelectionFile));
  EXPECT_TRUE(sel.contains("unimportant"));

  std::ofstream(dir_ / "lasso.csv") << "name,rank\nx3,1\nx2,2\nx1,3\n";
  ASSERT_EQ(run({"evaluate", "-m", "vtf", "rvtw", "--external", (dir_ / "lasso.csv").string()}),
            0)
      << err_.str();
  const std::string chart = slurp(dir_ / (std::string(cli::kComparisonFile) + ".svg"));
  EXPECT_NE(chart.find(">vtf<"), std::string::npos);
  EXPECT_NE(chart.find(">rvtw<"), std::string::npos);
  EXPECT_NE(chart.find(">lasso<"), std::string::npos);
  const json cmp = json::parse(slurp(dir_ / (std::string(cli::kComparisonFile) + ".json")));
  EXPECT_EQ(cmp.at("methods").size(), 3u);

  ASSERT_EQ(run({"report"}), 0) << err_.str();
  const std::string md = slurp(dir_ / cli::kReportFile);
  EXPECT_NE(md.find("Rashomon exploration"), std::string::npos);
  EXPECT_NE(md.find("Drop-and-refit comparison"), std::string::npos);
}

TEST_F(CliRun, CfNeedsEnoughRetrains) {
  ASSERT_EQ(run({"train-base"}), 0) << err_.str();
  ASSERT_EQ(run({"explore", "-n", "2", "--epsilon", "0.5"}), 0) << err_.str();
  EXPECT_EQ(run({"explain", "cf"}), 3);
  EXPECT_NE(err_.str().find("N >= d"), std::string::npos);
}

}  // namespace
}  // namespace vtf
