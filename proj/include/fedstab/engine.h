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

#ifndef FEDSTAB_ENGINE_H_
#define FEDSTAB_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedstab/data.h"
#include "fedstab/model.h"
#include "fedstab/param_vector.h"

namespace fedstab {

enum class ScheduleKind { kConstant, kInverseSqrt, kExponential };

struct Schedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double c = 1.0;        // inverse_sqrt cap constant
  double epsilon = 1.0;  // exponential decay factor in (0, 1]
};

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

// constant: base; inverse_sqrt: min(base, sqrt(c / max(t, 1))); exponential: base * eps^t.
double lr_schedule(const Schedule& schedule, double base, std::size_t t);

enum class ServerOptKind { kSgd, kMomentum };

struct ServerOpt {
  ServerOptKind kind = ServerOptKind::kSgd;
  double beta = 0.0;
  double nu = 1.0;
};

struct FederationConfig {
  std::size_t clients = 1;
  std::size_t local_steps = 1;  // K
  std::size_t batch_size = 1;   // b
  double eta_l = 0.01;
  double eta_g = 1.0;
  Schedule schedule;
  std::size_t rounds = 1;  // T
  double participation = 1.0;
  ServerOpt server;
  std::uint64_t seed = 0;
  std::size_t eval_every = 5;
  std::size_t workers = 1;

  void validate() const;
  // ceil(participation * N), at least one.
  std::size_t participants_per_round() const;
};

struct ServerState {
  ParamVector x;
  ParamVector m;  // momentum buffer; zeros for server SGD
  std::size_t t = 0;
};

struct RoundMetrics {
  std::size_t t = 0;
  double train_loss = 0.0;    // f(x^t), mean of client empirical risks
  double test_loss = 0.0;     // held-out estimate of F(x^t)
  double grad_norm_sq = 0.0;  // |grad f(x^t)|^2
  double gen_gap = 0.0;       // test_loss - train_loss
  double excess_risk = 0.0;   // test_loss - f_hat_min
  std::optional<double> stability_sq;  // probe runs only
  double eta_g_t = 0.0;
};

// K local mini-batch SGD steps from x_start on one client. Returns the
// uploaded update d_i = x^{t,0} - x^{t,K}, accumulated as eta_l * sum_k g_k.
// Each step draws b distinct shard positions from its own substream of
// `stream_seed`; the batch is reduced in ascending position order.
ParamVector local_sgd(const ModelSpec& spec, const FederatedData& train, std::size_t client,
                      const ParamVector& x_start, std::size_t local_steps, std::size_t batch_size,
                      double eta_l, std::uint64_t stream_seed);

// Positions (into a shard of size n) used by local step `step`.
std::vector<std::size_t> sample_batch_positions(std::size_t n, std::size_t batch_size,
                                                std::uint64_t stream_seed, std::size_t step);

// Arithmetic mean, summed in list order.
ParamVector aggregate(std::span<const ParamVector> deltas);

ServerState server_sgd_step(ServerState state, const ParamVector& d, double eta_g_t);
ServerState server_momentum_step(ServerState state, const ParamVector& d, double beta, double nu,
                                 double eta_g_t);

// Ascending client ids taking part in round t.
std::vector<std::size_t> sample_participants(const FederationConfig& config, std::size_t t);

// f(x) = (1/N) sum_i f_i(x) and its gradient, exact shard weighting.
double global_loss(const ModelSpec& spec, const FederatedData& data, const ParamVector& x);
ParamVector global_grad(const ModelSpec& spec, const FederatedData& data, const ParamVector& x);

RoundMetrics evaluate_round(const ModelSpec& spec, const FederatedData& train,
                            const FederatedData& test, const ParamVector& x, std::size_t t,
                            double eta_g_t, double f_hat_min);

// Algorithm state machine: one call to step() executes one communication round.
class FederatedEngine {
 public:
  FederatedEngine(const FederationConfig& config, const ModelSpec& spec,
                  const FederatedData& train, ParamVector x0);

  void step();
  const ServerState& state() const { return state_; }
  const FederationConfig& config() const { return config_; }
  const std::vector<std::size_t>& last_participants() const { return participants_; }
  double eta_at(std::size_t t) const { return lr_schedule(config_.schedule, config_.eta_g, t); }

  static constexpr double kDivergenceNorm = 1e8;

 private:
  FederationConfig config_;
  ModelSpec spec_;
  const FederatedData* train_;
  ServerState state_;
  std::vector<std::size_t> participants_;
};

struct RunOptions {
  std::optional<ParamVector> initial_params;
  double f_hat_min = 0.0;
  bool keep_trajectory = false;
};

struct RunResult {
  std::vector<RoundMetrics> metrics;
  ParamVector final_params;
  std::vector<ParamVector> trajectory;  // x^0..x^T when requested
};

// True when round t is a metric round (every eval_every rounds and the last).
bool is_eval_round(const FederationConfig& config, std::size_t t);

RunResult run_federated(const FederationConfig& config, const FederatedData& train,
                        const ModelSpec& spec, const FederatedData& test,
                        const RunOptions& options = {});

}  // namespace fedstab

#endif  // FEDSTAB_ENGINE_H_
