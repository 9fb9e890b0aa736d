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

#ifndef FEDSTAB_BOUNDS_H_
#define FEDSTAB_BOUNDS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fedstab {

// Inputs shared by every bound. Derived quantities are methods, never cached.
struct BoundInputs {
  double L = 1.0;
  double sigma_l_sq = 1.0;
  double sigma_g_sq = 1.0;
  double n = 100.0;  // total samples
  std::size_t K = 1;
  std::size_t T = 100;
  double c = 0.1;  // eta_g^t <= sqrt(c / t)
  double eta_l = 0.01;
  double F_init = 1.0;
  double beta = 0.0;
  double nu = 1.0;
  double gamma = 1.0;
  double C = 1.0;
  std::optional<double> mu;
  std::size_t b = 1;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  double psi() const;
  // 16 K (sigma_l^2 + 3 b sigma_g^2 / n).
  double psi_sigma() const;
  // sigma_l^2 + sigma_g^2 / n, the form used in the headline bound.
  double sigma_n_sq() const;
  // sigma_l^2 + 3 b sigma_g^2 / n, the form used inside psi_sigma.
  double sigma_n_sq_proof() const;
  double sigma_k_sq() const;
};

// (1 + 4 eta_l L)^K. Sets *out_of_range when the value leaves (1, 2).
double psi(double eta_l, double L, std::size_t K, bool* out_of_range = nullptr);

using StepSchedule = std::function<double(std::size_t)>;

// sqrt(c / max(t, 1)).
StepSchedule inverse_sqrt_steps(double c);
StepSchedule constant_steps(double eta);

struct Recursion {
  std::vector<double> s;  // s[0..T]
  std::vector<std::string> warnings;
};

enum class RecursionVariant {
  kExact,    // contraction factor (1 - eta)^2 + eta^2 psi
  kRelaxed,  // (1 - eta)^2 bounded by 1, the path to the closed form
};

Recursion stability_recursion_sgd(const BoundInputs& in, const StepSchedule& eta_g,
                                  RecursionVariant variant = RecursionVariant::kExact);

// (psi_sigma / psi) * T^{c psi}.
double stability_closed_form_sgd(const BoundInputs& in);

// s[t+1] = alpha^t s[t] + beta^2 s[t-1] + gamma^t.
Recursion stability_recursion_fosm(const BoundInputs& in, const StepSchedule& eta_g);

// sqrt(sigma_K^2 F / (T K)) + sigma_K^2 / T, leading constants 1.
double convergence_bound_sgd(const BoundInputs& in);

struct StepsizeTuning {
  double eta_star = 0.0;   // grid argmin of Psi
  double grid_min = 0.0;   // Psi(eta_star)
  double bound_rhs = 0.0;  // closed-form upper bound
};

inline constexpr std::size_t kStepsizeGridPoints = 10000;

// Psi(eta) = r0 / (eta T) + b eta + e eta^2 minimised over a log grid in (0, 1/d].
StepsizeTuning tune_stepsize(double r0, double b, double e, double d, double T);

struct ExcessRiskBound {
  double total = 0.0;
  double convergence_sqrt = 0.0;  // sqrt term
  double convergence_linear = 0.0;
  double stability = 0.0;
  double stability_proof_sigma = 0.0;  // same term with the proof-level sigma_n^2
  double log_stability = 0.0;          // finite even when `stability` overflows
  double optimization = 0.0;           // F / (K sqrt(T c))
  double exponent = 0.0;               // (1 - c psi) / 3, or (1 - nu^2 c psi) / 3
  double beta_minus = 1.0;
  double log_beta_plus = 0.0;
  double log_psi_beta = 0.0;
  bool overfitting_regime = false;
  std::vector<std::string> warnings;
};

ExcessRiskBound excess_risk_bound_sgd(const BoundInputs& in);
ExcessRiskBound excess_risk_bound_fosm(const BoundInputs& in);

// log((q^T - 1) / (q - 1)) with q = 2 beta (beta + 1); log T at q = 1.
double log_psi_beta(double beta, std::size_t T);

struct Envelope {
  std::vector<double> value;
  std::size_t argmin = 0;  // predicted benign-fitting round
};

// ((L + gamma) / 2) s[t] + (1 / (2 gamma) + C) g[t].
Envelope assemble_excess_envelope(const BoundInputs& in, const std::vector<double>& s,
                                  const std::vector<double>& g);

}  // namespace fedstab

#endif  // FEDSTAB_BOUNDS_H_
