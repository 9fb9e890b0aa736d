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

#ifndef FEDSTAB_COMMANDS_H_
#define FEDSTAB_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fedstab/config.h"

namespace fedstab {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> eval_every;
};

void apply_overrides(Config& config, const Overrides& overrides);

enum class SweepAxis { kK, kBeta, kEpsilon, kEtaG };
std::string_view to_string(SweepAxis axis);

struct ExperimentPlan {
  std::string base_config;  // resolved against the plan file's directory
  SweepAxis axis = SweepAxis::kK;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
};

ExperimentPlan load_plan(const std::string& path);
// Sets the swept hyperparameter on a copy of the base config.
Config apply_axis(Config config, SweepAxis axis, double value);

// Runs one experiment and writes metrics.csv and summary.json into out_dir.
void run_to_directory(const Config& config, const std::string& out_dir);

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& plan_path, const std::string& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_probe(const std::string& config_path, const std::string& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_bounds(const std::string& config_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err);
int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir,
               std::ostream& out, std::ostream& err);

}  // namespace fedstab

#endif  // FEDSTAB_COMMANDS_H_
