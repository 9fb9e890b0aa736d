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

#include "fedstab/engine.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "fedstab/errors.h"
#include "fedstab/rng.h"

namespace fedstab {
namespace {

void require_same_dim(const ParamVector& a, const ParamVector& b, const char* what) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw PreconditionError(msg.str());
  }
}

// Chooses `count` distinct values of [0, n) and returns them ascending.
std::vector<std::size_t> choose_sorted(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (count >= n) return pool;
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant:
      return "constant";
    case ScheduleKind::kInverseSqrt:
      return "inverse_sqrt";
    case ScheduleKind::kExponential:
      return "exponential";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "inverse_sqrt") return ScheduleKind::kInverseSqrt;
  if (name == "exponential") return ScheduleKind::kExponential;
  throw ConfigError("unknown schedule '" + std::string(name) + "'");
}

double lr_schedule(const Schedule& schedule, double base, std::size_t t) {
  switch (schedule.kind) {
    case ScheduleKind::kConstant:
      return base;
    case ScheduleKind::kInverseSqrt: {
      if (!(schedule.c > 0.0)) throw ConfigError("inverse_sqrt schedule needs c > 0");
      const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
      return std::min(base, std::sqrt(schedule.c / tt));
    }
    case ScheduleKind::kExponential:
      if (!(schedule.epsilon > 0.0 && schedule.epsilon <= 1.0)) {
        throw ConfigError("exponential schedule needs epsilon in (0, 1]");
      }
      return base * std::pow(schedule.epsilon, static_cast<double>(t));
  }
  return base;
}

void FederationConfig::validate() const {
  if (clients < 1) throw ConfigError("federation: clients must be >= 1");
  if (local_steps < 1) throw ConfigError("federation: local_steps (K) must be >= 1");
  if (batch_size < 1) throw ConfigError("federation: batch_size must be >= 1");
  if (!(eta_l > 0.0) || !std::isfinite(eta_l)) throw ConfigError("federation: eta_l must be > 0");
  if (!(eta_g > 0.0) || !std::isfinite(eta_g)) throw ConfigError("federation: eta_g must be > 0");
  if (!(participation > 0.0 && participation <= 1.0)) {
    throw ConfigError("federation: participation must be in (0, 1]");
  }
  if (eval_every < 1) throw ConfigError("federation: eval_every must be >= 1");
  if (server.kind == ServerOptKind::kMomentum) {
    if (!(server.beta >= 0.0 && server.beta < 1.0)) {
      throw ConfigError("federation: beta must be in [0, 1)");
    }
    if (!(server.nu > 0.0)) throw ConfigError("federation: nu must be > 0");
  }
  if (schedule.kind == ScheduleKind::kExponential &&
      !(schedule.epsilon > 0.0 && schedule.epsilon <= 1.0)) {
    throw ConfigError("federation: epsilon must be in (0, 1]");
  }
  if (schedule.kind == ScheduleKind::kInverseSqrt && !(schedule.c > 0.0)) {
    throw ConfigError("federation: schedule c must be > 0");
  }
}

std::size_t FederationConfig::participants_per_round() const {
  // Guard against 0.1 * 100 landing a hair above 10.
  const double raw = participation * static_cast<double>(clients);
  const auto m = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(m, 1, clients);
}

std::vector<std::size_t> sample_batch_positions(std::size_t n, std::size_t batch_size,
                                                std::uint64_t stream_seed, std::size_t step) {
  Rng rng = make_rng(mix_seed(stream_seed, step));
  return choose_sorted(n, batch_size, rng);
}

ParamVector local_sgd(const ModelSpec& spec, const FederatedData& train, std::size_t client,
                      const ParamVector& x_start, std::size_t local_steps, std::size_t batch_size,
                      double eta_l, std::uint64_t stream_seed) {
  const ClientShard& shard = train.shards.at(client);
  if (batch_size < 1 || batch_size > shard.size()) {
    std::ostringstream msg;
    msg << "batch size " << batch_size << " exceeds client " << client << " shard size "
        << shard.size();
    throw ConfigError(msg.str());
  }
  ParamVector x = x_start;
  ParamVector delta(x_start.size());
  std::vector<std::size_t> rows(batch_size);
  for (std::size_t k = 0; k < local_steps; ++k) {
    const auto positions = sample_batch_positions(shard.size(), batch_size, stream_seed, k);
    for (std::size_t s = 0; s < batch_size; ++s) rows[s] = shard.indices[positions[s]];
    const ParamVector g = grad(spec, x, Batch{train.dataset.examples, rows});
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double step = eta_l * g[c];
      x[c] -= step;
      delta[c] += step;
    }
  }
  return delta;
}

ParamVector aggregate(std::span<const ParamVector> deltas) {
  if (deltas.empty()) throw PreconditionError("aggregate: no participating clients");
  ParamVector sum(deltas.front().size());
  for (const auto& d : deltas) {
    require_same_dim(sum, d, "aggregate");
    sum += d;
  }
  const double count = static_cast<double>(deltas.size());
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] /= count;
  return sum;
}

ServerState server_sgd_step(ServerState state, const ParamVector& d, double eta_g_t) {
  require_same_dim(state.x, d, "server_sgd_step");
  state.x.add_scaled(d, -eta_g_t);
  ++state.t;
  return state;
}

ServerState server_momentum_step(ServerState state, const ParamVector& d, double beta, double nu,
                                 double eta_g_t) {
  require_same_dim(state.x, d, "server_momentum_step");
  require_same_dim(state.m, d, "server_momentum_step");
  for (std::size_t c = 0; c < d.size(); ++c) state.m[c] = beta * state.m[c] + nu * d[c];
  state.x.add_scaled(state.m, -eta_g_t);
  ++state.t;
  return state;
}

std::vector<std::size_t> sample_participants(const FederationConfig& config, std::size_t t) {
  const std::size_t m = config.participants_per_round();
  if (m >= config.clients) {
    std::vector<std::size_t> all(config.clients);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  Rng rng = make_rng(mix_seed(config.seed, {stream::kParticipation, t}));
  return choose_sorted(config.clients, m, rng);
}

double global_loss(const ModelSpec& spec, const FederatedData& data, const ParamVector& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.num_clients(); ++i) acc += loss(spec, x, data.shard_batch(i));
  return acc / static_cast<double>(data.num_clients());
}

ParamVector global_grad(const ModelSpec& spec, const FederatedData& data, const ParamVector& x) {
  ParamVector acc(x.size());
  for (std::size_t i = 0; i < data.num_clients(); ++i) acc += grad(spec, x, data.shard_batch(i));
  acc.scale(1.0 / static_cast<double>(data.num_clients()));
  return acc;
}

RoundMetrics evaluate_round(const ModelSpec& spec, const FederatedData& train,
                            const FederatedData& test, const ParamVector& x, std::size_t t,
                            double eta_g_t, double f_hat_min) {
  RoundMetrics m;
  m.t = t;
  m.train_loss = global_loss(spec, train, x);
  m.test_loss = global_loss(spec, test, x);
  m.grad_norm_sq = global_grad(spec, train, x).squared_norm();
  m.gen_gap = m.test_loss - m.train_loss;
  m.excess_risk = m.test_loss - f_hat_min;
  m.eta_g_t = eta_g_t;
  return m;
}

FederatedEngine::FederatedEngine(const FederationConfig& config, const ModelSpec& spec,
                                 const FederatedData& train, ParamVector x0)
    : config_(config), spec_(spec), train_(&train) {
  config_.validate();
  spec_.validate();
  if (train.num_clients() != config_.clients) {
    throw ConfigError("federation: config has " + std::to_string(config_.clients) +
                      " clients but the data has " + std::to_string(train.num_clients()) +
                      " shards");
  }
  validate_shards(train.shards, train.dataset.size());
  if (x0.size() != spec_.param_dim()) throw ConfigError("initial parameters have wrong dimension");
  for (const auto& shard : train.shards) {
    if (config_.batch_size > shard.size()) {
      throw ConfigError("batch size " + std::to_string(config_.batch_size) + " exceeds client " +
                        std::to_string(shard.client_id) + " shard size " +
                        std::to_string(shard.size()));
    }
  }
  state_.m = ParamVector(x0.size());
  state_.x = std::move(x0);
}

void FederatedEngine::step() {
  const std::size_t t = state_.t;
  participants_ = sample_participants(config_, t);
  std::vector<ParamVector> deltas(participants_.size());
  auto work = [&](std::size_t slot) {
    const std::size_t client = participants_[slot];
    const std::uint64_t seed = mix_seed(config_.seed, {stream::kLocal, t, client});
    deltas[slot] = local_sgd(spec_, *train_, client, state_.x, config_.local_steps,
                             config_.batch_size, config_.eta_l, seed);
  };

  const std::size_t workers = std::min(config_.workers, participants_.size());
  try {
    if (workers <= 1) {
      for (std::size_t s = 0; s < participants_.size(); ++s) work(s);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t s = w; s < participants_.size(); s += workers) work(s);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
  } catch (const NumericError& e) {
    throw NumericError("round " + std::to_string(t) + ": " + e.what());
  }

  const ParamVector d = aggregate(deltas);
  const double eta = eta_at(t);
  if (config_.server.kind == ServerOptKind::kSgd) {
    state_ = server_sgd_step(std::move(state_), d, eta);
  } else {
    state_ = server_momentum_step(std::move(state_), d, config_.server.beta, config_.server.nu, eta);
  }
  if (!state_.x.all_finite()) {
    throw NumericError("round " + std::to_string(t) + ": non-finite global parameters");
  }
  const double norm = std::sqrt(state_.x.squared_norm());
  if (norm > kDivergenceNorm) {
    std::ostringstream msg;
    msg << "round " << t << ": parameter norm " << norm << " exceeds divergence guard "
        << kDivergenceNorm;
    throw NumericError(msg.str());
  }
}

bool is_eval_round(const FederationConfig& config, std::size_t t) {
  return t % config.eval_every == 0 || t == config.rounds;
}

RunResult run_federated(const FederationConfig& config, const FederatedData& train,
                        const ModelSpec& spec, const FederatedData& test,
                        const RunOptions& options) {
  ParamVector x0 = options.initial_params ? *options.initial_params
                                          : init_params(spec, config.seed);
  FederatedEngine engine(config, spec, train, std::move(x0));
  RunResult result;
  for (std::size_t t = 0;; ++t) {
    const ParamVector& x = engine.state().x;
    if (options.keep_trajectory) result.trajectory.push_back(x);
    if (is_eval_round(config, t)) {
      result.metrics.push_back(
          evaluate_round(spec, train, test, x, t, engine.eta_at(t), options.f_hat_min));
    }
    if (t == config.rounds) break;
    engine.step();
  }
  result.final_params = engine.state().x;
  return result;
}

}  // namespace fedstab
