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

#ifndef FEDSTAB_EXPERIMENT_H_
#define FEDSTAB_EXPERIMENT_H_

#include <memory>

#include "fedstab/config.h"
#include "fedstab/data.h"
#include "fedstab/engine.h"
#include "fedstab/model.h"
#include "fedstab/probe.h"

namespace fedstab {

// Everything a run needs, materialised from a Config.
struct Experiment {
  FederationConfig federation;
  ModelSpec spec;
  FederatedData train;
  FederatedData test;
  std::shared_ptr<const SampleSource> source;  // null for csv data
};

TaskKind task_for(const ModelSpec& spec);

Experiment build_experiment(const Config& config);

// Analytic solve, else a reference run, else zero when the reference diverges.
EmpiricalMinimum resolve_minimum(const Experiment& experiment, std::size_t budget);

}  // namespace fedstab

#endif  // FEDSTAB_EXPERIMENT_H_
