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

#ifndef FEDSTAB_PROBE_H_
#define FEDSTAB_PROBE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedstab/data.h"
#include "fedstab/engine.h"
#include "fedstab/model.h"

namespace fedstab {

// Per-round mean squared distance between coupled trajectories.
struct StabilityCurve {
  std::vector<double> mean_sq_dist;  // index t = 0..T
  std::vector<double> std_error;  // standard error across replicates
  std::size_t replicates = 0;
  std::vector<std::size_t> replaced_indices;
};

struct TwinResult {
  std::vector<double> sq_dist;  // |x^t - x~^t|^2 for t = 0..T
  std::vector<RoundMetrics> base_metrics;
  std::vector<RoundMetrics> perturbed_metrics;
  ParamVector base_final;
  ParamVector perturbed_final;
};

struct TwinOptions {
  bool record_metrics = true;
  double f_hat_min = 0.0;
  std::optional<ParamVector> initial_params;
};

// Runs the federated loop on both datasets of the pair with identical derived random
// streams (same participants, same batch positions) in lockstep.
TwinResult twin_run(const FederationConfig& config, const NeighborPair& pair,
                    const std::vector<ClientShard>& shards, const ModelSpec& spec,
                    const FederatedData& test, const TwinOptions& options = {});

struct StabilityOptions {
  std::size_t replicates = 16;  // J
  std::uint64_t seed = 0;       // selects the replaced indices and replacement draws
  Replacement mode = Replacement::kFreshDraw;
  std::optional<ParamVector> initial_params;
};

// J distinct indices in [0, n), drawn from the probe stream of `seed`.
std::vector<std::size_t> sample_probe_indices(std::size_t n, std::size_t replicates,
                                              std::uint64_t seed);

// Averages twin_run curves over J indices drawn uniformly without replacement.
StabilityCurve on_average_stability(const FederationConfig& config, const FederatedData& train,
                                    const SampleSource& source, const ModelSpec& spec,
                                    const FederatedData& test, const StabilityOptions& options);

// Folds several replicate curves (any mix of indices and seeds) into one.
StabilityCurve combine_replicates(const std::vector<std::vector<double>>& curves,
                                  std::vector<std::size_t> indices);

double gradient_norm_sq(const ModelSpec& spec, const FederatedData& data, const ParamVector& x);

struct ExcessRiskCurve {
  std::vector<std::size_t> t;
  std::vector<double> excess;
  std::size_t t_star = 0;  // first round attaining the minimum
  double e_min = 0.0;
};

ExcessRiskCurve excess_risk_curve(const std::vector<RoundMetrics>& metrics, double f_hat_min);

enum class MinimumStrategy { kAnalytic, kReferenceRun, kZero };
std::string_view to_string(MinimumStrategy strategy);

struct EmpiricalMinimum {
  double value = 0.0;
  MinimumStrategy strategy = MinimumStrategy::kZero;
  bool budget_limited = false;  // iterative estimate: an upper bound on f(x_hat)
  ParamVector argmin;
};

// Linear regression: weighted normal equations. Otherwise (or if singular):
// best loss seen over `budget` full-batch gradient steps with step 1/L_hat.
EmpiricalMinimum estimate_empirical_minimum(const ModelSpec& spec, const FederatedData& data,
                                            std::size_t budget);

struct SigmaEstimate {
  double sigma_l_sq = 0.0;
  double sigma_g_sq = 0.0;
  std::vector<double> sigma_l_sq_per_point;
  std::vector<double> sigma_g_sq_per_point;
};

// sigma_l^2: mean over clients of E|g_b - grad f_i|^2 for a size-b batch drawn
// without replacement, computed exactly from per-sample gradients.
// sigma_g^2: max over clients of |grad f_i - grad f|^2. Both maxed over probes.
SigmaEstimate estimate_sigmas(const ModelSpec& spec, const FederatedData& data,
                              const std::vector<ParamVector>& probes, std::size_t batch_size);

// Lower bound on L: max over random pairs (x, x + radius * u) of the gradient
// difference ratio; x = center + radius * N(0, I).
double estimate_smoothness(const ModelSpec& spec, const FederatedData& data,
                           std::size_t num_pairs, double radius, std::uint64_t seed,
                           const ParamVector& center);

// Least-squares slope of log(value + floor) against log(t) (or against t when
// `log_x` is false) over the given points.
double log_slope(const std::vector<double>& x, const std::vector<double>& y, bool log_x,
                 double floor = 1e-20);

}  // namespace fedstab

#endif  // FEDSTAB_PROBE_H_
