// Copyright 2026 The fedstab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fedstab/commands.h"
#include "fedstab/output.h"

namespace fedstab {
namespace {

namespace fs = std::filesystem;

constexpr const char* kRunConfig = R"(
[federation]
clients = 4
local_steps = 2
batch_size = 4
eta_l = 0.1
rounds = 12
eval_every = 4
seed = 3

[model]
family = logistic
input_dim = 3

[data]
per_client_n = 10
hetero = 0.5
noise = 0.3
test_per_client = 20
)";

constexpr const char* kBoundsConfig = R"(
[bounds]
L = 1
sigma_l_sq = 1
sigma_g_sq = 0.5
n = 100
K = 2
T = 50
c = 0.1
eta_l = 0.05
F_init = 1
record_every = 5
)";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fedstab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string write(const std::string& name, const std::string& text) {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::size_t line_count(const std::string& file) {
    std::istringstream in(read_file(file));
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, RunWritesMetricsAndSummary) {
  const auto cfg = write("run.ini", kRunConfig);
  ASSERT_EQ(cmd_run(cfg, path("out"), {}, out_, err_), kExitOk) << err_.str();
  const std::string csv = read_file(path("out/metrics.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kMetricsHeader);
  EXPECT_EQ(line_count(path("out/metrics.csv")), 1u + 12 / 4 + 1);
  const auto j = nlohmann::json::parse(read_file(path("out/summary.json")));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j.contains("e_min"));
  EXPECT_TRUE(j.contains("t_star"));
  EXPECT_EQ(j["f_hat_min"]["strategy"], "reference_run");
}

TEST_F(CliTest, RunIsByteReproducible) {
  const auto cfg = write("run.ini", kRunConfig);
  ASSERT_EQ(cmd_run(cfg, path("a"), {}, out_, err_), kExitOk);
  ASSERT_EQ(cmd_run(cfg, path("b"), {}, out_, err_), kExitOk);
  EXPECT_EQ(read_file(path("a/metrics.csv")), read_file(path("b/metrics.csv")));
  EXPECT_EQ(read_file(path("a/summary.json")), read_file(path("b/summary.json")));
  Overrides o;
  o.seed = 4;
  ASSERT_EQ(cmd_run(cfg, path("c"), o, out_, err_), kExitOk);
  EXPECT_NE(read_file(path("a/metrics.csv")), read_file(path("c/metrics.csv")));
}

TEST_F(CliTest, MissingFederationExitsTwo) {
  const auto cfg = write("bad.ini", "[model]\nfamily = logistic\n");
  EXPECT_EQ(cmd_run(cfg, path("out"), {}, out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("[federation]"), std::string::npos);
}

TEST_F(CliTest, UnreadableConfigExitsTwo) {
  EXPECT_EQ(cmd_run(path("nope.ini"), path("out"), {}, out_, err_), kExitConfig);
}

TEST_F(CliTest, BinaryExitCodes) {
  const auto cfg = write("run.ini", kRunConfig);
  const std::string cli = FEDSTAB_CLI_PATH;
  EXPECT_EQ(std::system((cli + " run --config " + cfg + " --out " + path("bin") + " > /dev/null").c_str()), 0);
  const auto bad = write("bad.ini", "[model]\n");
  const int status = std::system((cli + " run --config " + bad + " --out " + path("x") + " 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(status), kExitConfig);
  const int usage = std::system((cli + " frobnicate 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(usage), kExitConfig);
}

TEST_F(CliTest, ProbeDegenerateCurveIsZero) {
  const auto cfg = write("probe.ini", std::string(kRunConfig) +
                                          "[probe]\nreplicates = 1\nmode = original\n");
  ASSERT_EQ(cmd_probe(cfg, path("p"), {}, out_, err_), kExitOk) << err_.str();
  std::istringstream csv(read_file(path("p/probe.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, kProbeHeader);
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto first = line.find(',');
    EXPECT_EQ(line.substr(first + 1, 2), "0,") << line;
  }
  EXPECT_EQ(rows, 13u);
  const auto j = nlohmann::json::parse(read_file(path("p/summary.json")));
  EXPECT_EQ(j["J"], 1);
  EXPECT_TRUE(j["f_hat_min"].contains("strategy"));
}

TEST_F(CliTest, ProbeRequiresSection) {
  const auto cfg = write("run.ini", kRunConfig);
  EXPECT_EQ(cmd_probe(cfg, path("p"), {}, out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("[probe]"), std::string::npos);
}

TEST_F(CliTest, BoundsZeroBetaEnvelopesIdentical) {
  const auto cfg = write("b.ini", kBoundsConfig);
  ASSERT_EQ(cmd_bounds(cfg, path("b"), out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(read_file(path("b/envelope_sgd.csv")), read_file(path("b/envelope_fosm.csv")));
  const auto j = nlohmann::json::parse(read_file(path("b/bounds.json")));
  EXPECT_FALSE(j["overfitting_regime"].get<bool>());
  EXPECT_EQ(line_count(path("b/recursion.csv")), 11u);
}

TEST_F(CliTest, BoundsOverfittingFlag) {
  const auto cfg = write("b.ini", std::string(kBoundsConfig) + "beta = 0.2\n");
  std::string text = read_file(cfg);
  text.replace(text.find("c = 0.1"), 7, "c = 0.9");
  write("b.ini", text);
  ASSERT_EQ(cmd_bounds(cfg, path("b"), out_, err_), kExitOk);
  const auto j = nlohmann::json::parse(read_file(path("b/bounds.json")));
  EXPECT_TRUE(j["overfitting_regime"].get<bool>());
  EXPECT_FALSE(j["warnings"].empty());
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_NE(read_file(path("b/envelope_sgd.csv")), read_file(path("b/envelope_fosm.csv")));
}

TEST_F(CliTest, BoundsMissingLNamesField) {
  std::string text = kBoundsConfig;
  text.replace(text.find("L = 1\n"), 6, "");
  const auto cfg = write("b.ini", text);
  EXPECT_EQ(cmd_bounds(cfg, path("b"), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("'L'"), std::string::npos);
}

TEST_F(CliTest, SweepMergesCells) {
  write("base.ini", kRunConfig);
  const auto plan = write("plan.ini", "[plan]\nbase = base.ini\nK = 1,2,4\nseeds = 1,2\n");
  Overrides o;
  o.workers = 2;
  ASSERT_EQ(cmd_sweep(plan, path("s"), o, out_, err_), kExitOk) << err_.str();
  std::size_t cells = 0, rows = 0;
  for (const auto& entry : fs::directory_iterator(path("s"))) {
    if (!entry.is_directory()) continue;
    ++cells;
    rows += line_count((entry.path() / "metrics.csv").string()) - 1;
  }
  EXPECT_EQ(cells, 6u);
  EXPECT_EQ(line_count(path("s/merged.csv")) - 1, rows);
  const std::string merged = read_file(path("s/merged.csv"));
  EXPECT_EQ(merged.substr(0, merged.find('\n')), "axis,value,seed," + std::string(kMetricsHeader));
  // Pool size does not change outputs.
  o.workers = 1;
  ASSERT_EQ(cmd_sweep(plan, path("s1"), o, out_, err_), kExitOk);
  EXPECT_EQ(merged, read_file(path("s1/merged.csv")));
}

TEST_F(CliTest, SweepPlanValidation) {
  write("base.ini", kRunConfig);
  EXPECT_EQ(cmd_sweep(write("p1.ini", "[plan]\nbase = base.ini\nK =\nseeds = 1\n"), path("s"), {},
                      out_, err_),
            kExitConfig);
  EXPECT_EQ(cmd_sweep(write("p2.ini", "[plan]\nbase = base.ini\nK = 1\nbeta = 0.5\nseeds = 1\n"),
                      path("s"), {}, out_, err_),
            kExitConfig);
  EXPECT_EQ(cmd_sweep(write("p3.ini", "[plan]\nbase = base.ini\nK = 1\n"), path("s"), {}, out_,
                      err_),
            kExitConfig);
}

TEST_F(CliTest, ReportSingleRun) {
  const auto cfg = write("run.ini", kRunConfig);
  ASSERT_EQ(cmd_run(cfg, path("r"), {}, out_, err_), kExitOk);
  std::ostringstream text;
  ASSERT_EQ(cmd_report({path("r")}, path("rep"), text, err_), kExitOk) << err_.str();
  EXPECT_EQ(line_count(path("rep/report.csv")), 2u);
  EXPECT_NE(text.str().find("trend tests skipped"), std::string::npos);
}

TEST_F(CliTest, ReportSkipsMissingSummary) {
  const auto cfg = write("run.ini", kRunConfig);
  ASSERT_EQ(cmd_run(cfg, path("r"), {}, out_, err_), kExitOk);
  fs::create_directories(path("empty"));
  std::ostringstream text;
  EXPECT_EQ(cmd_report({path("r"), path("empty")}, "", text, err_), kExitOk);
  EXPECT_NE(err_.str().find("skipped"), std::string::npos);
}

TEST_F(CliTest, ReportTrendAndMismatchedAxes) {
  write("base.ini", kRunConfig);
  ASSERT_EQ(cmd_sweep(write("k.ini", "[plan]\nbase = base.ini\nK = 1,4\nseeds = 1\n"), path("k"),
                      {}, out_, err_),
            kExitOk);
  ASSERT_EQ(cmd_sweep(write("b.ini", "[plan]\nbase = base.ini\nbeta = 0.5\nseeds = 1\n"),
                      path("b"), {}, out_, err_),
            kExitOk);
  std::ostringstream text;
  ASSERT_EQ(cmd_report({path("k/K_1_seed_1"), path("k/K_4_seed_1")}, "", text, err_), kExitOk);
  EXPECT_NE(text.str().find("monotone-in-K"), std::string::npos);
  std::ostringstream mixed;
  EXPECT_EQ(cmd_report({path("k/K_1_seed_1"), path("k/K_4_seed_1"), path("b/beta_0.5_seed_1")}, "",
                       mixed, err_),
            kExitConfig);
  EXPECT_NE(err_.str().find("'beta'"), std::string::npos);
}

TEST_F(CliTest, ShippedConfigsParse) {
  const std::string root = FEDSTAB_SOURCE_DIR;
  EXPECT_EQ(cmd_bounds(root + "/configs/bounds.ini", path("b"), out_, err_), kExitOk) << err_.str();
  EXPECT_NO_THROW(load_plan(root + "/configs/sweep_k.ini"));
  EXPECT_NO_THROW(load_config(root + "/configs/default.ini").require_federation());
  EXPECT_NO_THROW(load_config(root + "/configs/probe.ini").require_probe());
}

}  // namespace
}  // namespace fedstab
