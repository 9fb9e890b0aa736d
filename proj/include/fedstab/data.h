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

#ifndef FEDSTAB_DATA_H_
#define FEDSTAB_DATA_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedstab/model.h"
#include "fedstab/rng.h"

namespace fedstab {

struct GlobalDataset {
  std::vector<Example> examples;
  std::size_t num_classes = 0;  // 0 for regression targets
  std::string distribution_tag;

  std::size_t size() const { return examples.size(); }
  std::size_t feature_dim() const { return examples.empty() ? 0 : examples.front().features.size(); }
  friend bool operator==(const GlobalDataset&, const GlobalDataset&) = default;
};

struct ClientShard {
  std::size_t client_id = 0;
  std::vector<std::size_t> indices;  // ascending global indices

  std::size_t size() const { return indices.size(); }
  friend bool operator==(const ClientShard&, const ClientShard&) = default;
};

// Training or test data together with its client layout.
struct FederatedData {
  GlobalDataset dataset;
  std::vector<ClientShard> shards;

  std::size_t num_clients() const { return shards.size(); }
  Batch shard_batch(std::size_t client) const {
    return Batch{dataset.examples, shards[client].indices};
  }
};

// Draws fresh i.i.d. examples from client i's distribution P_i.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t num_clients() const = 0;
  virtual Example draw(std::size_t client, Rng& rng) const = 0;
};

enum class TaskKind { kRegression, kBinary, kMulticlass };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct SyntheticOptions {
  TaskKind task = TaskKind::kRegression;
  std::size_t clients = 1;
  std::size_t per_client_n = 1;
  std::size_t input_dim = 5;
  std::size_t num_classes = 2;  // multiclass only
  double hetero = 0.0;
  double noise = 0.0;
  double signal = 1.0;  // norm of the shared ground-truth parameter
  std::uint64_t seed = 0;
};

// Features x ~ N(0, I). Client i labels with its own ground truth
// w_i = w0 + hetero * u_i (u_i a unit direction):
//   regression  y = w_i.x + noise * e
//   binary      y = [w_i.x + noise * e > 0]
//   multiclass  y = argmax_c (W_i x + noise * e)_c
class SyntheticGenerator : public SampleSource {
 public:
  explicit SyntheticGenerator(const SyntheticOptions& options);

  std::size_t num_clients() const override { return options_.clients; }
  Example draw(std::size_t client, Rng& rng) const override;

  const SyntheticOptions& options() const { return options_; }
  // Row-major [rows x input_dim]; rows = num_classes for multiclass, else 1.
  const std::vector<double>& client_truth(std::size_t client) const { return truth_[client]; }
  const std::vector<double>& shared_truth() const { return shared_; }

 private:
  SyntheticOptions options_;
  std::size_t rows_;
  std::vector<double> shared_;
  std::vector<std::vector<double>> truth_;
};

// Label-skewed client distributions on top of a homogeneous base generator:
// client i first draws a class from its own proportions, then samples the
// base distribution conditioned on that class (rejection sampling).
class ClassMixtureSource : public SampleSource {
 public:
  ClassMixtureSource(std::shared_ptr<const SyntheticGenerator> base,
                     std::vector<std::vector<double>> class_proportions);

  std::size_t num_clients() const override { return proportions_.size(); }
  Example draw(std::size_t client, Rng& rng) const override;

  const std::vector<double>& proportions(std::size_t client) const { return proportions_[client]; }

 private:
  std::shared_ptr<const SyntheticGenerator> base_;
  std::vector<std::vector<double>> proportions_;
};

struct SyntheticTask {
  FederatedData train;
  std::shared_ptr<const SampleSource> source;
};

// Generator-partitioned task: client i receives per_client_n draws from P_i.
SyntheticTask gen_synthetic(const SyntheticOptions& options);

// Pool of clients * per_client_n draws from the homogeneous base generator
// (hetero ignored), partitioned across clients by Dirichlet(alpha) over labels.
SyntheticTask gen_dirichlet_task(const SyntheticOptions& options, double alpha,
                                 std::size_t min_shard = 1);

// Held-out set with per_client draws from each client's distribution.
FederatedData make_test_set(const SampleSource& source, std::size_t per_client, std::uint64_t seed);

// Shards smaller than min_size are topped up from the largest shard.
std::vector<ClientShard> dirichlet_partition(const GlobalDataset& dataset, std::size_t clients,
                                             double alpha, std::uint64_t seed,
                                             std::size_t min_size = 1);

struct NeighborPair {
  GlobalDataset base;
  GlobalDataset perturbed;
  std::size_t j = 0;
  std::size_t owner = 0;
};

enum class Replacement {
  kFreshDraw,      // i.i.d. draw from the owner's distribution
  kForceOriginal,  // replacement equals the original sample (coupling check)
};

NeighborPair make_neighbor(const GlobalDataset& dataset, const std::vector<ClientShard>& shards,
                           const SampleSource& source, std::size_t j, std::uint64_t seed,
                           Replacement mode = Replacement::kFreshDraw);

// Client whose shard contains global index j.
std::size_t owner_of(const std::vector<ClientShard>& shards, std::size_t j);

// Throws ConfigError unless shards are disjoint, non-empty and cover [0, n).
void validate_shards(const std::vector<ClientShard>& shards, std::size_t n);

// Number of positions where the two datasets differ.
std::size_t hamming_distance(const GlobalDataset& a, const GlobalDataset& b);

// CSV: header row "f0,...,f{d-1},label", one example per row. Optional leading
// "# key=value" lines carry num_classes and the distribution tag.
void save_csv(const GlobalDataset& dataset, const std::string& path);
GlobalDataset load_csv(const std::string& path,
                       std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace fedstab

#endif  // FEDSTAB_DATA_H_
