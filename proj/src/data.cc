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

#include "fedstab/data.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fedstab/errors.h"

namespace fedstab {
namespace {

std::vector<double> gaussian_unit(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  double norm_sq = 0.0;
  for (double& e : v) {
    e = normal(rng);
    norm_sq += e * e;
  }
  const double inv = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
  for (double& e : v) e *= inv;
  return v;
}

std::string format_tag(std::string_view prefix, const SyntheticOptions& o) {
  std::ostringstream tag;
  tag << prefix << "-" << to_string(o.task) << "-d" << o.input_dim << "-hetero" << o.hetero
      << "-noise" << o.noise;
  return tag.str();
}

void validate_options(const SyntheticOptions& o) {
  if (o.clients < 1) throw ConfigError("data: number of clients must be >= 1");
  if (o.per_client_n < 1) throw ConfigError("data: per_client_n must be >= 1");
  if (o.input_dim < 1) throw ConfigError("data: input_dim must be >= 1");
  if (!(o.hetero >= 0.0)) throw ConfigError("data: hetero must be >= 0");
  if (!(o.noise >= 0.0)) throw ConfigError("data: noise must be >= 0");
  if (o.task == TaskKind::kMulticlass && o.num_classes < 2) {
    throw ConfigError("data: multiclass task needs num_classes >= 2");
  }
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kRegression:
      return "regression";
    case TaskKind::kBinary:
      return "binary";
    case TaskKind::kMulticlass:
      return "multiclass";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "regression") return TaskKind::kRegression;
  if (name == "binary") return TaskKind::kBinary;
  if (name == "multiclass") return TaskKind::kMulticlass;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

SyntheticGenerator::SyntheticGenerator(const SyntheticOptions& options)
    : options_(options),
      rows_(options.task == TaskKind::kMulticlass ? options.num_classes : 1) {
  validate_options(options_);
  const std::size_t width = rows_ * options_.input_dim;
  Rng rng = make_rng(mix_seed(options_.seed, {stream::kData, label_of("truth")}));
  shared_ = gaussian_unit(width, rng);
  for (double& e : shared_) e *= options_.signal;
  truth_.reserve(options_.clients);
  for (std::size_t i = 0; i < options_.clients; ++i) {
    Rng dir_rng = make_rng(mix_seed(options_.seed, {stream::kData, label_of("direction"), i}));
    std::vector<double> u = gaussian_unit(width, dir_rng);
    std::vector<double> w = shared_;
    for (std::size_t k = 0; k < width; ++k) w[k] += options_.hetero * u[k];
    truth_.push_back(std::move(w));
  }
}

Example SyntheticGenerator::draw(std::size_t client, Rng& rng) const {
  if (client >= options_.clients) throw PreconditionError("generator: client id out of range");
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = options_.input_dim;
  Example ex;
  ex.features.resize(d);
  for (double& f : ex.features) f = normal(rng);
  const auto& w = truth_[client];
  std::vector<double> scores(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += w[r * d + k] * ex.features[k];
    scores[r] = s + options_.noise * normal(rng);
  }
  switch (options_.task) {
    case TaskKind::kRegression:
      ex.label = scores[0];
      break;
    case TaskKind::kBinary:
      ex.label = scores[0] > 0.0 ? 1.0 : 0.0;
      break;
    case TaskKind::kMulticlass:
      ex.label = static_cast<double>(std::distance(
          scores.begin(), std::max_element(scores.begin(), scores.end())));
      break;
  }
  return ex;
}

ClassMixtureSource::ClassMixtureSource(std::shared_ptr<const SyntheticGenerator> base,
                                       std::vector<std::vector<double>> class_proportions)
    : base_(std::move(base)), proportions_(std::move(class_proportions)) {
  if (base_->options().task == TaskKind::kRegression) {
    throw ConfigError("class mixture needs a classification base generator");
  }
}

Example ClassMixtureSource::draw(std::size_t client, Rng& rng) const {
  if (client >= proportions_.size()) throw PreconditionError("mixture: client id out of range");
  const auto& p = proportions_[client];
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  const std::size_t target = pick(rng);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Example ex = base_->draw(0, rng);
    if (ex.class_id() == target) return ex;
  }
  throw NumericError("mixture: class " + std::to_string(target) +
                     " is unreachable under the base generator");
}

SyntheticTask gen_synthetic(const SyntheticOptions& options) {
  auto generator = std::make_shared<const SyntheticGenerator>(options);
  SyntheticTask task;
  auto& data = task.train.dataset;
  data.num_classes = options.task == TaskKind::kRegression  ? 0
                     : options.task == TaskKind::kBinary    ? 2
                                                            : options.num_classes;
  data.distribution_tag = format_tag("synthetic", options);
  data.examples.reserve(options.clients * options.per_client_n);
  for (std::size_t i = 0; i < options.clients; ++i) {
    Rng rng = make_rng(mix_seed(options.seed, {stream::kData, i}));
    ClientShard shard{i, {}};
    for (std::size_t s = 0; s < options.per_client_n; ++s) {
      shard.indices.push_back(data.examples.size());
      data.examples.push_back(generator->draw(i, rng));
    }
    task.train.shards.push_back(std::move(shard));
  }
  task.source = generator;
  return task;
}

SyntheticTask gen_dirichlet_task(const SyntheticOptions& options, double alpha,
                                 std::size_t min_shard) {
  if (options.task == TaskKind::kRegression) {
    throw ConfigError("dirichlet partition needs a classification task");
  }
  SyntheticOptions base_opts = options;
  base_opts.clients = 1;
  base_opts.hetero = 0.0;
  auto base = std::make_shared<const SyntheticGenerator>(base_opts);

  SyntheticTask task;
  auto& data = task.train.dataset;
  data.num_classes = options.task == TaskKind::kBinary ? 2 : options.num_classes;
  std::ostringstream tag;
  tag << format_tag("dirichlet", base_opts) << "-alpha" << alpha;
  data.distribution_tag = tag.str();
  const std::size_t n = options.clients * options.per_client_n;
  Rng rng = make_rng(mix_seed(options.seed, {stream::kData, 0}));
  data.examples.reserve(n);
  for (std::size_t s = 0; s < n; ++s) data.examples.push_back(base->draw(0, rng));

  task.train.shards = dirichlet_partition(data, options.clients, alpha,
                                          mix_seed(options.seed, stream::kPartition), min_shard);
  std::vector<std::vector<double>> proportions;
  for (const auto& shard : task.train.shards) {
    std::vector<double> p(data.num_classes, 0.0);
    for (std::size_t j : shard.indices) p[data.examples[j].class_id()] += 1.0;
    for (double& v : p) v /= static_cast<double>(shard.size());
    proportions.push_back(std::move(p));
  }
  task.source = std::make_shared<const ClassMixtureSource>(base, std::move(proportions));
  return task;
}

FederatedData make_test_set(const SampleSource& source, std::size_t per_client, std::uint64_t seed) {
  if (per_client < 1) throw ConfigError("test set needs at least one example per client");
  FederatedData test;
  test.dataset.distribution_tag = "held-out";
  for (std::size_t i = 0; i < source.num_clients(); ++i) {
    Rng rng = make_rng(mix_seed(seed, {stream::kTest, i}));
    ClientShard shard{i, {}};
    for (std::size_t s = 0; s < per_client; ++s) {
      shard.indices.push_back(test.dataset.examples.size());
      test.dataset.examples.push_back(source.draw(i, rng));
    }
    test.shards.push_back(std::move(shard));
  }
  return test;
}

std::vector<ClientShard> dirichlet_partition(const GlobalDataset& dataset, std::size_t clients,
                                             double alpha, std::uint64_t seed,
                                             std::size_t min_size) {
  if (!(alpha > 0.0)) throw ConfigError("dirichlet alpha must be > 0");
  if (clients < 1) throw ConfigError("dirichlet partition needs >= 1 client");
  min_size = std::max<std::size_t>(min_size, 1);
  if (clients * min_size > dataset.size()) {
    throw ConfigError("dirichlet partition: " + std::to_string(clients) + " clients with " +
                      std::to_string(min_size) + " examples each exceed dataset size " +
                      std::to_string(dataset.size()));
  }
  if (dataset.num_classes == 0) throw ConfigError("dirichlet partition needs class labels");

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    const std::size_t c = dataset.examples[j].class_id();
    if (c >= dataset.num_classes) throw ConfigError("label exceeds num_classes");
    by_class[c].push_back(j);
  }

  std::vector<ClientShard> shards(clients);
  for (std::size_t i = 0; i < clients; ++i) shards[i].client_id = i;

  for (std::size_t c = 0; c < by_class.size(); ++c) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    Rng rng = make_rng(mix_seed(seed, {stream::kPartition, c}));
    auto& members = by_class[c];
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<double> p(clients);
    double total = 0.0;
    for (double& v : p) total += (v = gamma(rng));
    if (!(total > 0.0)) {
      std::fill(p.begin(), p.end(), 1.0);
      total = static_cast<double>(clients);
    }
    // Cumulative split points rounded to the nearest example.
    double cumulative = 0.0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < clients; ++i) {
      cumulative += p[i];
      const std::size_t stop =
          i + 1 == clients ? members.size()
                           : std::min(members.size(),
                                      static_cast<std::size_t>(std::llround(
                                          cumulative / total * static_cast<double>(members.size()))));
      for (std::size_t k = start; k < std::max(start, stop); ++k) {
        shards[i].indices.push_back(members[k]);
      }
      start = std::max(start, stop);
    }
  }

  // Undersized-shard repair: move one example at a time from the largest shard.
  for (auto& shard : shards) {
    while (shard.size() < min_size) {
      auto largest = std::max_element(shards.begin(), shards.end(),
                                       [](const ClientShard& a, const ClientShard& b) {
                                         return a.size() < b.size();
                                       });
      std::sort(largest->indices.begin(), largest->indices.end());
      shard.indices.push_back(largest->indices.back());
      largest->indices.pop_back();
    }
  }
  for (auto& shard : shards) std::sort(shard.indices.begin(), shard.indices.end());
  return shards;
}

std::size_t owner_of(const std::vector<ClientShard>& shards, std::size_t j) {
  for (const auto& shard : shards) {
    if (std::binary_search(shard.indices.begin(), shard.indices.end(), j)) return shard.client_id;
  }
  throw PreconditionError("index " + std::to_string(j) + " belongs to no shard");
}

void validate_shards(const std::vector<ClientShard>& shards, std::size_t n) {
  if (shards.empty()) throw ConfigError("no client shards");
  std::vector<int> seen(n, 0);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    if (shards[i].client_id != i) throw ConfigError("shard client ids must be 0..N-1 in order");
    if (shards[i].indices.empty()) {
      throw ConfigError("client " + std::to_string(i) + " has an empty shard");
    }
    for (std::size_t j : shards[i].indices) {
      if (j >= n) throw ConfigError("shard index " + std::to_string(j) + " out of range");
      if (seen[j]++) throw ConfigError("index " + std::to_string(j) + " appears in two shards");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!seen[j]) throw ConfigError("index " + std::to_string(j) + " is not covered by any shard");
  }
}

NeighborPair make_neighbor(const GlobalDataset& dataset, const std::vector<ClientShard>& shards,
                           const SampleSource& source, std::size_t j, std::uint64_t seed,
                           Replacement mode) {
  if (j >= dataset.size()) {
    throw PreconditionError("neighbor index " + std::to_string(j) + " out of range [0, " +
                            std::to_string(dataset.size()) + ")");
  }
  NeighborPair pair;
  pair.j = j;
  pair.owner = owner_of(shards, j);
  pair.base = dataset;
  pair.perturbed = dataset;
  if (mode == Replacement::kFreshDraw) {
    Rng rng = make_rng(mix_seed(seed, {stream::kNeighbor, j}));
    pair.perturbed.examples[j] = source.draw(pair.owner, rng);
  }
  return pair;
}

std::size_t hamming_distance(const GlobalDataset& a, const GlobalDataset& b) {
  if (a.size() != b.size()) throw PreconditionError("datasets differ in length");
  std::size_t count = 0;
  for (std::size_t k = 0; k < a.size(); ++k) count += a.examples[k] == b.examples[k] ? 0 : 1;
  return count;
}

}  // namespace fedstab
