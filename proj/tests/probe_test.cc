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

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <set>

#include "fedstab/errors.h"
#include "fedstab/probe.h"

namespace fedstab {
namespace {

SyntheticTask binary_task(std::size_t clients, std::size_t per_client, std::uint64_t seed) {
  SyntheticOptions o;
  o.task = TaskKind::kBinary;
  o.clients = clients;
  o.per_client_n = per_client;
  o.input_dim = 4;
  o.hetero = 0.5;
  o.noise = 0.5;
  o.seed = seed;
  return gen_synthetic(o);
}

FederationConfig probe_config(std::size_t clients) {
  FederationConfig c;
  c.clients = clients;
  c.local_steps = 4;
  c.batch_size = 5;
  c.eta_l = 0.1;
  c.rounds = 30;
  c.seed = 2;
  return c;
}

const ModelSpec kLogistic{ModelFamily::kLogistic, 4};

TEST(Twin, DegenerateReplacementGivesZeroDistance) {
  const auto task = binary_task(5, 20, 1);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto pair = make_neighbor(task.train.dataset, task.train.shards, *task.source, 17, seed,
                                    Replacement::kForceOriginal);
    auto c = probe_config(5);
    c.seed = seed;
    c.participation = 0.6;
    const auto r = twin_run(c, pair, task.train.shards, kLogistic, task.train);
    for (double d : r.sq_dist) ASSERT_EQ(d, 0.0);
    EXPECT_TRUE(bitwise_equal(r.base_final, r.perturbed_final));
  }
}

TEST(Twin, FreshReplacementSeparatesTrajectories) {
  const auto task = binary_task(5, 20, 1);
  const auto pair = make_neighbor(task.train.dataset, task.train.shards, *task.source, 17, 3);
  const auto r = twin_run(probe_config(5), pair, task.train.shards, kLogistic, task.train);
  EXPECT_EQ(r.sq_dist.size(), 31u);
  EXPECT_EQ(r.sq_dist[0], 0.0);
  EXPECT_GT(r.sq_dist.back(), 0.0);
  ASSERT_FALSE(r.base_metrics.empty());
  EXPECT_EQ(r.base_metrics.back().stability_sq, r.sq_dist.back());
}

TEST(Twin, BaseSideMatchesPlainRun) {
  const auto task = binary_task(5, 20, 1);
  const auto pair = make_neighbor(task.train.dataset, task.train.shards, *task.source, 3, 3);
  const auto r = twin_run(probe_config(5), pair, task.train.shards, kLogistic, task.train);
  const auto plain = run_federated(probe_config(5), task.train, kLogistic, task.train);
  EXPECT_TRUE(bitwise_equal(r.base_final, plain.final_params));
}

// 1-D least squares with unit features and full-batch steps: the twin gap
// obeys diff' = (1 - eta) diff + eta (ybar - ybar').
TEST(Twin, OneDimensionalClosedForm) {
  GlobalDataset data;
  for (double y : {0.3, -1.2, 2.0, 0.7, 1.1}) data.examples.push_back({{1.0}, y});
  GlobalDataset other = data;
  other.examples[2].label = -0.5;
  NeighborPair pair{data, other, 2, 0};
  const std::vector<ClientShard> shards{{0, {0, 1, 2, 3, 4}}};
  ModelSpec spec{ModelFamily::kLinearRegression, 1};
  spec.bias = false;
  FederationConfig c;
  c.clients = 1;
  c.batch_size = 5;
  c.eta_l = 0.05;
  c.rounds = 100;
  const FederatedData test{data, shards};
  const auto r = twin_run(c, pair, shards, spec, test, {false, 0.0, ParamVector{0.4}});
  const double gap = (2.0 - (-0.5)) / 5.0;
  double diff = 0.0;
  for (std::size_t t = 0; t <= 100; ++t) {
    EXPECT_NEAR(std::sqrt(r.sq_dist[t]), std::abs(diff), 1e-10) << t;
    diff = (1.0 - 0.05) * diff + 0.05 * gap;
  }
}

TEST(Twin, RejectsMismatchedPair) {
  const auto task = binary_task(3, 10, 1);
  auto pair = make_neighbor(task.train.dataset, task.train.shards, *task.source, 4, 1);
  pair.perturbed.examples.pop_back();
  EXPECT_THROW(twin_run(probe_config(3), pair, task.train.shards, kLogistic, task.train),
               PreconditionError);
}

TEST(Stability, SingleReplicateEqualsTwinRun) {
  const auto task = binary_task(4, 15, 5);
  const auto c = probe_config(4);
  StabilityOptions opts;
  opts.replicates = 1;
  opts.seed = 8;
  const auto curve = on_average_stability(c, task.train, *task.source, kLogistic, task.train, opts);
  ASSERT_EQ(curve.replaced_indices.size(), 1u);
  const auto pair = make_neighbor(task.train.dataset, task.train.shards, *task.source,
                                  curve.replaced_indices[0], 8);
  TwinOptions twin_opts;
  twin_opts.record_metrics = false;
  const auto twin = twin_run(c, pair, task.train.shards, kLogistic, task.train, twin_opts);
  EXPECT_EQ(curve.mean_sq_dist, twin.sq_dist);
  for (double s : curve.std_error) EXPECT_EQ(s, 0.0);
}

TEST(Stability, IndicesDistinctAndReproducible) {
  const auto a = sample_probe_indices(60, 16, 4);
  EXPECT_EQ(a, sample_probe_indices(60, 16, 4));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 16u);
  for (std::size_t j : a) EXPECT_LT(j, 60u);
  EXPECT_THROW(sample_probe_indices(5, 6, 1), ConfigError);
}

TEST(Stability, RejectsTooManyReplicates) {
  const auto task = binary_task(2, 5, 5);
  StabilityOptions opts;
  opts.replicates = 11;
  EXPECT_THROW(on_average_stability(probe_config(2), task.train, *task.source, kLogistic,
                                    task.train, opts),
               ConfigError);
}

TEST(Stability, CombineComputesStandardError) {
  const auto c = combine_replicates({{0.0, 1.0}, {0.0, 3.0}}, {4, 9});
  EXPECT_EQ(c.mean_sq_dist, (std::vector<double>{0.0, 2.0}));
  // sample sd = sqrt(2), stderr = sqrt(2) / sqrt(2) = 1
  EXPECT_DOUBLE_EQ(c.std_error[1], 1.0);
  EXPECT_EQ(c.replicates, 2u);
}

TEST(Excess, FirstMinimumRound) {
  std::vector<RoundMetrics> m(4);
  const double losses[] = {0.9, 0.5, 0.5, 0.7};
  for (std::size_t k = 0; k < 4; ++k) {
    m[k].t = 10 * k;
    m[k].test_loss = losses[k];
  }
  const auto curve = excess_risk_curve(m, 0.2);
  EXPECT_EQ(curve.t_star, 10u);
  EXPECT_DOUBLE_EQ(curve.e_min, 0.3);
  EXPECT_THROW(excess_risk_curve(m, NAN), PreconditionError);
}

TEST(Minimum, AnalyticLeastSquaresIsStationary) {
  SyntheticOptions o;
  o.task = TaskKind::kRegression;
  o.clients = 3;
  o.per_client_n = 12;
  o.input_dim = 3;
  o.hetero = 1.0;
  o.noise = 0.4;
  o.seed = 2;
  const auto task = gen_synthetic(o);
  ModelSpec spec{ModelFamily::kLinearRegression, 3};
  const auto min = estimate_empirical_minimum(spec, task.train, 10);
  EXPECT_EQ(min.strategy, MinimumStrategy::kAnalytic);
  EXPECT_FALSE(min.budget_limited);
  EXPECT_LT(gradient_norm_sq(spec, task.train, min.argmin), 1e-24);
}

TEST(Minimum, ReferenceRunImprovesWithBudget) {
  const auto task = binary_task(3, 20, 4);
  const auto small = estimate_empirical_minimum(kLogistic, task.train, 50);
  const auto large = estimate_empirical_minimum(kLogistic, task.train, 100);
  EXPECT_EQ(small.strategy, MinimumStrategy::kReferenceRun);
  EXPECT_TRUE(small.budget_limited);
  EXPECT_LE(large.value, small.value);
  EXPECT_LT(large.value, std::log(2.0));
}

TEST(Sigmas, LocalVarianceMatchesMonteCarlo) {
  const auto task = binary_task(3, 12, 6);
  const ParamVector x{0.2, -0.1, 0.3, 0.0, 0.1};
  const std::size_t b = 4;
  const auto est = estimate_sigmas(kLogistic, task.train, {x}, b);
  double mc = 0.0;
  const std::size_t draws = 20000;
  for (std::size_t i = 0; i < 3; ++i) {
    const ParamVector full = grad(kLogistic, x, task.train.shard_batch(i));
    double acc = 0.0;
    std::vector<std::size_t> rows(b);
    for (std::size_t s = 0; s < draws; ++s) {
      const auto pos = sample_batch_positions(12, b, 99 + i, s);
      for (std::size_t k = 0; k < b; ++k) rows[k] = task.train.shards[i].indices[pos[k]];
      acc += squared_distance(grad(kLogistic, x, Batch{task.train.dataset.examples, rows}), full);
    }
    mc += acc / static_cast<double>(draws) / 3.0;
  }
  EXPECT_NEAR(est.sigma_l_sq, mc, 0.03 * mc);
}

TEST(Sigmas, FullBatchAndIdenticalClients) {
  GlobalDataset data;
  for (double y : {0.0, 1.0, 1.0}) data.examples.push_back({{y - 0.5, 1.0}, y});
  for (double y : {0.0, 1.0, 1.0}) data.examples.push_back({{y - 0.5, 1.0}, y});
  data.num_classes = 2;
  FederatedData fd{data, {{0, {0, 1, 2}}, {1, {3, 4, 5}}}};
  ModelSpec spec{ModelFamily::kLogistic, 2};
  const auto est = estimate_sigmas(spec, fd, {ParamVector{0.3, -0.2, 0.1}}, 3);
  EXPECT_EQ(est.sigma_l_sq, 0.0);
  EXPECT_EQ(est.sigma_g_sq, 0.0);
  EXPECT_THROW(estimate_sigmas(spec, fd, {ParamVector(3)}, 4), ConfigError);
}

TEST(Smoothness, BoundedByHessianNorm) {
  SyntheticOptions o;
  o.task = TaskKind::kRegression;
  o.clients = 1;
  o.per_client_n = 40;
  o.input_dim = 2;
  o.seed = 12;
  const auto task = gen_synthetic(o);
  ModelSpec spec{ModelFamily::kLinearRegression, 2};
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (const auto& ex : task.train.dataset.examples) {
    const Eigen::Vector3d phi(ex.features[0], ex.features[1], 1.0);
    h += phi * phi.transpose() / 40.0;
  }
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(h).eigenvalues().maxCoeff();
  const double few = estimate_smoothness(spec, task.train, 8, 0.1, 3, ParamVector(3));
  const double many = estimate_smoothness(spec, task.train, 400, 0.1, 3, ParamVector(3));
  EXPECT_LE(few, many);
  EXPECT_LE(many, top * (1.0 + 1e-9));
  EXPECT_GE(many, 0.9 * top);
}

TEST(Slope, PowerLaw) {
  std::vector<double> t, y;
  for (double v : {10.0, 100.0, 1000.0}) {
    t.push_back(v);
    y.push_back(3.0 * std::pow(v, -0.5));
  }
  EXPECT_NEAR(log_slope(t, y, true, 0.0), -0.5, 1e-12);
}

}  // namespace
}  // namespace fedstab
