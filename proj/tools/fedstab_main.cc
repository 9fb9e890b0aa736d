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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fedstab/commands.h"

namespace {

void add_overrides(CLI::App* cmd, fedstab::Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override the federation seed");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--eval-every", o.eval_every, "Metric interval in rounds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedstab: federated local SGD stability and generalization toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::vector<std::string> run_dirs;
  fedstab::Overrides overrides;

  auto* run = app.add_subcommand("run", "Run one federated experiment");
  run->add_option("--config", config, "INI config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(run, overrides);

  auto* sweep = app.add_subcommand("sweep", "Run a one-axis sweep plan");
  sweep->add_option("--config", config, "Plan INI file")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides the plan)");
  add_overrides(sweep, overrides);

  auto* probe = app.add_subcommand("probe", "Measure on-average model stability");
  probe->add_option("--config", config, "INI config file")->required();
  probe->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(probe, overrides);

  auto* bounds = app.add_subcommand("bounds", "Evaluate stability and excess-risk bounds");
  bounds->add_option("--config", config, "INI config file")->required();
  bounds->add_option("--out", out_dir, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Summarise completed run directories");
  report->add_option("dirs", run_dirs, "Run directories")->required();
  report->add_option("--out", out_dir, "Write report.csv and report.txt here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fedstab::kExitConfig;
  }

  if (run->parsed()) return fedstab::cmd_run(config, out_dir, overrides, std::cout, std::cerr);
  if (sweep->parsed()) return fedstab::cmd_sweep(config, out_dir, overrides, std::cout, std::cerr);
  if (probe->parsed()) return fedstab::cmd_probe(config, out_dir, overrides, std::cout, std::cerr);
  if (bounds->parsed()) return fedstab::cmd_bounds(config, out_dir, std::cout, std::cerr);
  return fedstab::cmd_report(run_dirs, out_dir, std::cout, std::cerr);
}
