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

#include "fedstab/experiment.h"

#include "fedstab/errors.h"
#include "fedstab/rng.h"

namespace fedstab {
namespace {

std::vector<ClientShard> contiguous_shards(std::size_t n, std::size_t clients) {
  if (clients > n) {
    throw ConfigError("data: " + std::to_string(clients) + " clients but only " +
                      std::to_string(n) + " examples");
  }
  std::vector<ClientShard> shards(clients);
  for (std::size_t i = 0; i < clients; ++i) {
    shards[i].client_id = i;
    for (std::size_t j = i * n / clients; j < (i + 1) * n / clients; ++j) {
      shards[i].indices.push_back(j);
    }
  }
  return shards;
}

}  // namespace

TaskKind task_for(const ModelSpec& spec) {
  switch (spec.family) {
    case ModelFamily::kLinearRegression:
      return TaskKind::kRegression;
    case ModelFamily::kLogistic:
      return TaskKind::kBinary;
    case ModelFamily::kMlp:
      return TaskKind::kMulticlass;
  }
  return TaskKind::kRegression;
}

Experiment build_experiment(const Config& config) {
  Experiment ex;
  ex.federation = config.require_federation();
  ex.spec = config.model;
  ex.federation.validate();
  ex.spec.validate();
  const DataConfig& d = config.data;
  const std::uint64_t seed = config.data_seed();

  if (d.source == DataSource::kCsv) {
    if (d.train_csv.empty()) throw ConfigError("[data] train_csv is required for source=csv");
    if (d.test_csv.empty()) throw ConfigError("[data] test_csv is required for source=csv");
    ex.train.dataset = load_csv(d.train_csv, ex.spec.input_dim);
    ex.test.dataset = load_csv(d.test_csv, ex.spec.input_dim);
    const std::size_t clients = ex.federation.clients;
    if (d.partition == "dirichlet") {
      ex.train.shards = dirichlet_partition(ex.train.dataset, clients, d.alpha,
                                            mix_seed(seed, stream::kPartition),
                                            ex.federation.batch_size);
    } else {
      ex.train.shards = contiguous_shards(ex.train.dataset.size(), clients);
    }
    ex.test.shards = contiguous_shards(ex.test.dataset.size(), 1);
    return ex;
  }

  const TaskKind task = d.task.value_or(task_for(ex.spec));
  if (task != task_for(ex.spec) &&
      !(ex.spec.family == ModelFamily::kMlp && task == TaskKind::kBinary)) {
    throw ConfigError("[data] task " + std::string(to_string(task)) + " does not fit model family " +
                      std::string(to_string(ex.spec.family)));
  }
  SyntheticOptions opts;
  opts.task = task;
  opts.clients = ex.federation.clients;
  opts.per_client_n = d.per_client_n;
  opts.input_dim = ex.spec.input_dim;
  opts.num_classes = task == TaskKind::kBinary ? 2 : ex.spec.num_classes;
  opts.hetero = d.hetero;
  opts.noise = d.noise;
  opts.signal = d.signal;
  opts.seed = seed;
  SyntheticTask built =
      d.source == DataSource::kDirichlet ? gen_dirichlet_task(opts, d.alpha, ex.federation.batch_size)
                                         : gen_synthetic(opts);
  ex.train = std::move(built.train);
  ex.source = std::move(built.source);
  ex.test = make_test_set(*ex.source, d.test_per_client, mix_seed(seed, stream::kTest));
  ex.test.dataset.num_classes = ex.train.dataset.num_classes;
  return ex;
}

EmpiricalMinimum resolve_minimum(const Experiment& experiment, std::size_t budget) {
  try {
    return estimate_empirical_minimum(experiment.spec, experiment.train, budget);
  } catch (const NumericError&) {
    EmpiricalMinimum zero;
    zero.strategy = MinimumStrategy::kZero;
    return zero;
  }
}

}  // namespace fedstab
