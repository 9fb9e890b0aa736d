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

#include "fedstab/probe.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fedstab/errors.h"
#include "fedstab/rng.h"

namespace fedstab {
namespace {

FederatedData with_dataset(const GlobalDataset& dataset, const std::vector<ClientShard>& shards) {
  return FederatedData{dataset, shards};
}

std::vector<double> random_direction(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(dim);
  double norm_sq = 0.0;
  for (double& v : u) {
    v = normal(rng);
    norm_sq += v * v;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : u) v *= inv;
  return u;
}

std::optional<ParamVector> solve_least_squares(const ModelSpec& spec, const FederatedData& data) {
  const std::size_t d = spec.param_dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd phi(d);
  const double n_clients = static_cast<double>(data.num_clients());
  for (const auto& shard : data.shards) {
    const double w = 1.0 / (n_clients * static_cast<double>(shard.size()));
    for (std::size_t j : shard.indices) {
      const Example& ex = data.dataset.examples[j];
      for (std::size_t k = 0; k < spec.input_dim; ++k) phi(k) = ex.features[k];
      if (spec.bias) phi(spec.input_dim) = 1.0;
      gram.noalias() += w * phi * phi.transpose();
      rhs.noalias() += w * ex.label * phi;
    }
  }
  gram.diagonal().array() += spec.weight_decay;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (!(top > 0.0) || bottom <= 1e-12 * top) return std::nullopt;
  const Eigen::VectorXd theta = gram.ldlt().solve(rhs);
  ParamVector out(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = theta(k);
  return out;
}

}  // namespace

TwinResult twin_run(const FederationConfig& config, const NeighborPair& pair,
                    const std::vector<ClientShard>& shards, const ModelSpec& spec,
                    const FederatedData& test, const TwinOptions& options) {
  if (pair.base.size() != pair.perturbed.size()) {
    throw PreconditionError("twin_run: neighbor datasets differ in length");
  }
  if (pair.j >= pair.base.size()) throw PreconditionError("twin_run: replaced index out of range");
  if (owner_of(shards, pair.j) != pair.owner) {
    throw PreconditionError("twin_run: owner shard does not contain the replaced index");
  }
  const FederatedData base = with_dataset(pair.base, shards);
  const FederatedData perturbed = with_dataset(pair.perturbed, shards);
  ParamVector x0 = options.initial_params ? *options.initial_params : init_params(spec, config.seed);
  FederatedEngine a(config, spec, base, x0);
  FederatedEngine b(config, spec, perturbed, std::move(x0));

  TwinResult out;
  out.sq_dist.reserve(config.rounds + 1);
  for (std::size_t t = 0;; ++t) {
    out.sq_dist.push_back(squared_distance(a.state().x, b.state().x));
    if (options.record_metrics && is_eval_round(config, t)) {
      auto ma = evaluate_round(spec, base, test, a.state().x, t, a.eta_at(t), options.f_hat_min);
      auto mb = evaluate_round(spec, perturbed, test, b.state().x, t, b.eta_at(t), options.f_hat_min);
      ma.stability_sq = out.sq_dist.back();
      mb.stability_sq = out.sq_dist.back();
      out.base_metrics.push_back(ma);
      out.perturbed_metrics.push_back(mb);
    }
    if (t == config.rounds) break;
    a.step();
    b.step();
  }
  out.base_final = a.state().x;
  out.perturbed_final = b.state().x;
  return out;
}

StabilityCurve combine_replicates(const std::vector<std::vector<double>>& curves,
                                  std::vector<std::size_t> indices) {
  if (curves.empty()) throw PreconditionError("no replicate curves to combine");
  const std::size_t len = curves.front().size();
  StabilityCurve out;
  out.replicates = curves.size();
  out.replaced_indices = std::move(indices);
  out.mean_sq_dist.assign(len, 0.0);
  out.std_error.assign(len, 0.0);
  const double count = static_cast<double>(curves.size());
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& c : curves) {
      if (c.size() != len) throw PreconditionError("replicate curves differ in length");
      sum += c[t];
    }
    const double mean = sum / count;
    out.mean_sq_dist[t] = mean;
    if (curves.size() > 1) {
      double ss = 0.0;
      for (const auto& c : curves) ss += (c[t] - mean) * (c[t] - mean);
      out.std_error[t] = std::sqrt(ss / (count - 1.0) / count);
    }
  }
  return out;
}

std::vector<std::size_t> sample_probe_indices(std::size_t n, std::size_t replicates,
                                              std::uint64_t seed) {
  if (replicates > n) throw ConfigError("cannot sample more indices than examples");
  Rng rng = make_rng(mix_seed(seed, stream::kProbe));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t k = 0; k < replicates; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(replicates);
  return pool;
}

StabilityCurve on_average_stability(const FederationConfig& config, const FederatedData& train,
                                    const SampleSource& source, const ModelSpec& spec,
                                    const FederatedData& test, const StabilityOptions& options) {
  const std::size_t n = train.dataset.size();
  if (options.replicates < 1 || options.replicates > n) {
    throw ConfigError("stability probe needs 1 <= J <= n (J=" +
                      std::to_string(options.replicates) + ", n=" + std::to_string(n) + ")");
  }
  const std::vector<std::size_t> pool = sample_probe_indices(n, options.replicates, options.seed);

  TwinOptions twin_opts;
  twin_opts.record_metrics = false;
  twin_opts.initial_params = options.initial_params;
  std::vector<std::vector<double>> curves;
  curves.reserve(pool.size());
  for (std::size_t j : pool) {
    const NeighborPair pair =
        make_neighbor(train.dataset, train.shards, source, j, options.seed, options.mode);
    curves.push_back(twin_run(config, pair, train.shards, spec, test, twin_opts).sq_dist);
  }
  return combine_replicates(curves, pool);
}

double gradient_norm_sq(const ModelSpec& spec, const FederatedData& data, const ParamVector& x) {
  return global_grad(spec, data, x).squared_norm();
}

ExcessRiskCurve excess_risk_curve(const std::vector<RoundMetrics>& metrics, double f_hat_min) {
  if (!std::isfinite(f_hat_min)) throw PreconditionError("f_hat_min must be finite");
  ExcessRiskCurve out;
  bool first = true;
  for (const auto& m : metrics) {
    const double e = m.test_loss - f_hat_min;
    out.t.push_back(m.t);
    out.excess.push_back(e);
    if (first || e < out.e_min) {
      out.e_min = e;
      out.t_star = m.t;
      first = false;
    }
  }
  return out;
}

std::string_view to_string(MinimumStrategy strategy) {
  switch (strategy) {
    case MinimumStrategy::kAnalytic:
      return "analytic";
    case MinimumStrategy::kReferenceRun:
      return "reference_run";
    case MinimumStrategy::kZero:
      return "zero";
  }
  return "?";
}

EmpiricalMinimum estimate_empirical_minimum(const ModelSpec& spec, const FederatedData& data,
                                            std::size_t budget) {
  if (budget < 1) throw ConfigError("empirical minimum budget must be >= 1");
  spec.validate();
  EmpiricalMinimum out;
  if (spec.family == ModelFamily::kLinearRegression) {
    if (auto theta = solve_least_squares(spec, data)) {
      out.value = global_loss(spec, data, *theta);
      out.strategy = MinimumStrategy::kAnalytic;
      out.argmin = std::move(*theta);
      return out;
    }
  }

  // Long centralized reference run: full-batch GD, best iterate kept.
  ParamVector x = init_params(spec, 0);
  const double l_hat = estimate_smoothness(spec, data, 16, 1e-3, 0, x);
  double step = 1.0 / std::max(l_hat, 1e-12);
  double current = global_loss(spec, data, x);
  out.value = current;
  out.argmin = x;
  for (std::size_t it = 0; it < budget; ++it) {
    const ParamVector g = global_grad(spec, data, x);
    ParamVector next = x;
    next.add_scaled(g, -step);
    double next_loss = global_loss(spec, data, next);
    // Halve the step until the loss does not increase (bounded retries).
    for (int retry = 0; retry < 30 && next_loss > current; ++retry) {
      step *= 0.5;
      next = x;
      next.add_scaled(g, -step);
      next_loss = global_loss(spec, data, next);
    }
    x = std::move(next);
    current = next_loss;
    if (current < out.value) {
      out.value = current;
      out.argmin = x;
    }
  }
  out.strategy = MinimumStrategy::kReferenceRun;
  out.budget_limited = true;
  return out;
}

SigmaEstimate estimate_sigmas(const ModelSpec& spec, const FederatedData& data,
                              const std::vector<ParamVector>& probes, std::size_t batch_size) {
  if (probes.empty()) throw PreconditionError("estimate_sigmas needs at least one probe point");
  std::size_t min_n = data.shards.front().size();
  for (const auto& shard : data.shards) min_n = std::min(min_n, shard.size());
  if (batch_size < 1 || batch_size > min_n) {
    throw ConfigError("estimate_sigmas: batch size " + std::to_string(batch_size) +
                      " exceeds smallest shard size " + std::to_string(min_n));
  }
  SigmaEstimate out;
  const double b = static_cast<double>(batch_size);
  for (const auto& x : probes) {
    const std::size_t dim = x.size();
    std::vector<ParamVector> client_grads;
    double local_var_sum = 0.0;
    for (const auto& shard : data.shards) {
      const double n = static_cast<double>(shard.size());
      std::vector<ParamVector> per_sample;
      per_sample.reserve(shard.size());
      ParamVector mean(dim);
      for (std::size_t j : shard.indices) {
        per_sample.push_back(sample_grad(spec, x, data.dataset.examples[j]));
        mean += per_sample.back();
      }
      mean.scale(1.0 / n);
      double spread = 0.0;
      for (const auto& g : per_sample) spread += squared_distance(g, mean);
      spread /= n;
      // Variance of the mean of b draws without replacement.
      const double factor = shard.size() > 1 ? (n - b) / (b * (n - 1.0)) : 0.0;
      local_var_sum += factor * spread;
      mean.add_scaled(x, spec.weight_decay);
      client_grads.push_back(std::move(mean));
    }
    ParamVector global(dim);
    for (const auto& g : client_grads) global += g;
    global.scale(1.0 / static_cast<double>(client_grads.size()));
    double worst = 0.0;
    for (const auto& g : client_grads) worst = std::max(worst, squared_distance(g, global));
    const double local = local_var_sum / static_cast<double>(data.num_clients());
    out.sigma_l_sq_per_point.push_back(local);
    out.sigma_g_sq_per_point.push_back(worst);
    out.sigma_l_sq = std::max(out.sigma_l_sq, local);
    out.sigma_g_sq = std::max(out.sigma_g_sq, worst);
  }
  return out;
}

double estimate_smoothness(const ModelSpec& spec, const FederatedData& data,
                           std::size_t num_pairs, double radius, std::uint64_t seed,
                           const ParamVector& center) {
  if (num_pairs < 1) throw ConfigError("estimate_smoothness needs num_pairs >= 1");
  if (!(radius > 0.0)) throw ConfigError("estimate_smoothness needs radius > 0");
  const std::size_t dim = center.size();
  double best = 0.0;
  for (std::size_t p = 0; p < num_pairs; ++p) {
    Rng rng = make_rng(mix_seed(seed, {label_of("smoothness"), p}));
    std::normal_distribution<double> normal(0.0, 1.0);
    ParamVector x = center;
    for (std::size_t k = 0; k < dim; ++k) x[k] += radius * normal(rng);
    const auto u = random_direction(dim, rng);
    ParamVector y = x;
    for (std::size_t k = 0; k < dim; ++k) y[k] += radius * u[k];
    const double gap = std::sqrt(squared_distance(x, y));
    if (!(gap > 0.0)) continue;
    const double ratio =
        std::sqrt(squared_distance(global_grad(spec, data, x), global_grad(spec, data, y))) / gap;
    best = std::max(best, ratio);
  }
  return best;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y, bool log_x,
                 double floor) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("log_slope needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(x.size()), ys(y.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    xs[k] = log_x ? std::log(x[k]) : x[k];
    ys[k] = std::log(y[k] + floor);
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace fedstab
