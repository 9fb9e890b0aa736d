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

#ifndef FEDSTAB_CONFIG_H_
#define FEDSTAB_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedstab/bounds.h"
#include "fedstab/data.h"
#include "fedstab/engine.h"
#include "fedstab/model.h"

namespace fedstab {

enum class DataSource { kSynthetic, kDirichlet, kCsv };

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::optional<TaskKind> task;  // defaults from the model family
  std::size_t per_client_n = 50;
  double hetero = 0.0;
  double noise = 0.0;
  double signal = 1.0;
  double alpha = 0.5;  // dirichlet concentration
  std::size_t test_per_client = 50;
  std::optional<std::uint64_t> seed;  // defaults to the federation seed
  std::string train_csv;
  std::string test_csv;
  std::string partition = "contiguous";  // csv: contiguous | dirichlet
};

struct ProbeConfig {
  std::size_t replicates = 16;
  std::vector<std::size_t> indices;  // empty: sample uniformly
  std::vector<std::uint64_t> seeds;  // empty: the federation seed
  Replacement mode = Replacement::kFreshDraw;
};

struct BoundsConfig {
  BoundInputs inputs;
  std::string schedule = "inverse_sqrt";  // inverse_sqrt | constant
  double eta = 0.1;                       // constant schedule only
  std::size_t record_every = 1;
};

struct Config {
  std::optional<FederationConfig> federation;
  ModelSpec model;
  DataConfig data;
  std::size_t reference_steps = 2000;  // empirical-minimum budget
  std::optional<ProbeConfig> probe;
  std::optional<BoundsConfig> bounds;

  // Throws ConfigError naming the section when it is absent.
  const FederationConfig& require_federation() const;
  const ProbeConfig& require_probe() const;
  const BoundsConfig& require_bounds() const;

  std::uint64_t data_seed() const;

  // Sorted key=value text of every resolved setting; stable across runs.
  std::string canonical() const;
  // 16 hex digits of a hash of canonical().
  std::string fingerprint() const;
};

// Parses INI text. Unknown sections or keys, bad values and duplicates are
// ConfigErrors naming the section and key.
Config parse_config(const std::string& text, const std::string& origin = "<config>");
Config load_config(const std::string& path);

std::string_view to_string(DataSource source);

}  // namespace fedstab

#endif  // FEDSTAB_CONFIG_H_
