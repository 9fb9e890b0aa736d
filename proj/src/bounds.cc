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

#include "fedstab/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedstab/errors.h"
#include "fedstab/text.h"

namespace fedstab {
namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string("bounds: ") + field + " " + what);
}

void note_large_steps(const StepSchedule& eta_g, std::size_t T, Recursion& out) {
  for (std::size_t t = 0; t < T; ++t) {
    if (eta_g(t) > 1.0) {
      out.warnings.push_back("eta_g^t > 1 at t=" + std::to_string(t) +
                             ": contraction assumption broken");
      return;
    }
  }
}

// Third envelope term in log space; both excess-risk variants go through here.
double log_stability_term(double sigma_n_sq, const BoundInputs& in, double log_beta_plus,
                          double exponent) {
  const double log_scale = std::log(sigma_n_sq) + 2.0 * std::log(in.F_init) + log_beta_plus -
                           std::log(static_cast<double>(in.K)) - std::log(in.c);
  return log_scale / 3.0 - exponent * std::log(static_cast<double>(in.T));
}

void fill_terms(const BoundInputs& in, double beta_minus, double log_beta_plus, double c_psi,
                ExcessRiskBound& out) {
  const double K = static_cast<double>(in.K);
  const double T = static_cast<double>(in.T);
  const double sk = in.sigma_k_sq();
  out.beta_minus = beta_minus;
  out.log_beta_plus = log_beta_plus;
  out.exponent = (1.0 - c_psi) / 3.0;
  out.convergence_sqrt = std::sqrt(beta_minus * sk * in.F_init / (K * T));
  out.convergence_linear = beta_minus * sk / T;
  out.log_stability = log_stability_term(in.sigma_n_sq(), in, log_beta_plus, out.exponent);
  out.stability = std::exp(out.log_stability);
  out.stability_proof_sigma =
      std::exp(log_stability_term(in.sigma_n_sq_proof(), in, log_beta_plus, out.exponent));
  out.optimization = in.F_init / (K * std::sqrt(T * in.c));
  out.total = out.convergence_sqrt + out.convergence_linear + out.stability + out.optimization;
  out.overfitting_regime = c_psi >= 1.0;
  if (out.overfitting_regime) {
    out.warnings.push_back("c*psi = " + format_double(c_psi) +
                           " >= 1: stability term does not decay in T (over-fitting regime)");
  }
  bool psi_out = false;
  psi(in.eta_l, in.L, in.K, &psi_out);
  if (psi_out) out.warnings.push_back("psi outside (1, 2): eta_l outside the 1/(KL) regime");
}

}  // namespace

void BoundInputs::validate() const {
  require(L > 0.0 && std::isfinite(L), "L", "must be > 0");
  require(sigma_l_sq >= 0.0 && std::isfinite(sigma_l_sq), "sigma_l_sq", "must be >= 0");
  require(sigma_g_sq >= 0.0 && std::isfinite(sigma_g_sq), "sigma_g_sq", "must be >= 0");
  require(n > 0.0 && std::isfinite(n), "n", "must be > 0");
  require(K >= 1, "K", "must be >= 1");
  require(T >= 1, "T", "must be >= 1");
  require(c > 0.0 && std::isfinite(c), "c", "must be > 0");
  require(eta_l > 0.0 && std::isfinite(eta_l), "eta_l", "must be > 0");
  require(F_init > 0.0 && std::isfinite(F_init), "F_init", "must be > 0");
  require(beta >= 0.0 && beta < 1.0, "beta", "must lie in [0, 1)");
  require(nu > 0.0 && std::isfinite(nu), "nu", "must be > 0");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma", "must be > 0");
  require(C >= 0.0 && std::isfinite(C), "C", "must be >= 0");
  require(!mu || *mu > 0.0, "mu", "must be > 0 when set");
  require(b >= 1, "b", "must be >= 1");
}

double BoundInputs::psi() const { return fedstab::psi(eta_l, L, K); }

double BoundInputs::psi_sigma() const {
  return 16.0 * static_cast<double>(K) * sigma_n_sq_proof();
}

double BoundInputs::sigma_n_sq() const { return sigma_l_sq + sigma_g_sq / n; }

double BoundInputs::sigma_n_sq_proof() const {
  return sigma_l_sq + 3.0 * static_cast<double>(b) * sigma_g_sq / n;
}

double BoundInputs::sigma_k_sq() const {
  return sigma_l_sq + static_cast<double>(K) * sigma_g_sq;
}

double psi(double eta_l, double L, std::size_t K, bool* out_of_range) {
  const double value = std::pow(1.0 + 4.0 * eta_l * L, static_cast<double>(K));
  if (out_of_range) *out_of_range = !(value > 1.0 && value < 2.0);
  return value;
}

StepSchedule inverse_sqrt_steps(double c) {
  return [c](std::size_t t) {
    return std::sqrt(c / static_cast<double>(std::max<std::size_t>(t, 1)));
  };
}

StepSchedule constant_steps(double eta) {
  return [eta](std::size_t) { return eta; };
}

Recursion stability_recursion_sgd(const BoundInputs& in, const StepSchedule& eta_g,
                                  RecursionVariant variant) {
  const double p = in.psi();
  const double noise = in.psi_sigma() * in.eta_l * in.eta_l;
  Recursion out;
  out.s.assign(in.T + 1, 0.0);
  for (std::size_t t = 0; t < in.T; ++t) {
    const double eta = eta_g(t);
    const double keep = variant == RecursionVariant::kExact ? (1.0 - eta) * (1.0 - eta) : 1.0;
    out.s[t + 1] = (keep + eta * eta * p) * out.s[t] + noise * eta * eta;
  }
  note_large_steps(eta_g, in.T, out);
  return out;
}

double stability_closed_form_sgd(const BoundInputs& in) {
  const double p = in.psi();
  return in.psi_sigma() / p * std::pow(static_cast<double>(in.T), in.c * p);
}

Recursion stability_recursion_fosm(const BoundInputs& in, const StepSchedule& eta_g) {
  const double p = in.psi();
  const double nu_sq = in.nu * in.nu;
  const double lead = (1.0 + in.beta) * (1.0 + in.beta);
  const double lag = in.beta * in.beta;
  Recursion out;
  out.s.assign(in.T + 1, 0.0);
  double prev = 0.0;  // s[t - 1]
  for (std::size_t t = 0; t < in.T; ++t) {
    const double eta = eta_g(t);
    const double alpha = lead + eta * eta * nu_sq * p;
    const double step = in.eta_l * eta;
    const double gamma = nu_sq * in.psi_sigma() * step * step;
    out.s[t + 1] = alpha * out.s[t] + lag * prev + gamma;
    prev = out.s[t];
  }
  note_large_steps(eta_g, in.T, out);
  return out;
}

double convergence_bound_sgd(const BoundInputs& in) {
  const double K = static_cast<double>(in.K);
  const double T = static_cast<double>(in.T);
  const double sk = in.sigma_k_sq();
  return std::sqrt(sk * in.F_init / (T * K)) + sk / T;
}

StepsizeTuning tune_stepsize(double r0, double b, double e, double d, double T) {
  if (!(r0 >= 0.0 && b >= 0.0 && e >= 0.0)) {
    throw ConfigError("tune_stepsize: r0, b, e must be >= 0");
  }
  if (!(d > 0.0)) throw ConfigError("tune_stepsize: d must be > 0");
  if (!(T >= 1.0)) throw ConfigError("tune_stepsize: T must be >= 1");
  StepsizeTuning out;
  const double cap = 1.0 / d;
  if (r0 == 0.0 && b == 0.0 && e == 0.0) {
    out.eta_star = cap;
    return out;
  }
  out.bound_rhs = 2.0 * std::sqrt(b * r0 / T) + 2.0 * std::cbrt(e) * std::pow(r0 / T, 2.0 / 3.0) +
                  d * r0 / T;

  // Lower grid end sits three decades below the smallest stationary candidate.
  double smallest = cap;
  if (b > 0.0 && r0 > 0.0) smallest = std::min(smallest, std::sqrt(r0 / (b * T)));
  if (e > 0.0 && r0 > 0.0) smallest = std::min(smallest, std::cbrt(r0 / (e * T)));
  const double lo = 1e-3 * smallest;
  const double log_lo = std::log(lo);
  const double log_span = std::log(cap) - log_lo;
  const auto objective = [&](double eta) { return r0 / (eta * T) + b * eta + e * eta * eta; };
  out.grid_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kStepsizeGridPoints; ++k) {
    const double eta = k + 1 == kStepsizeGridPoints
                           ? cap
                           : std::exp(log_lo + log_span * static_cast<double>(k) /
                                                   static_cast<double>(kStepsizeGridPoints - 1));
    const double value = objective(eta);
    if (value < out.grid_min) {
      out.grid_min = value;
      out.eta_star = eta;
    }
  }
  return out;
}

double log_psi_beta(double beta, std::size_t T) {
  const double q = 2.0 * beta * (beta + 1.0);
  const double t = static_cast<double>(T);
  if (std::abs(q - 1.0) < 1e-12) return std::log(t);
  if (q == 0.0) return 0.0;  // (0 - 1) / (0 - 1)
  const double log_q = std::log(q);
  if (q > 1.0) {
    // q^T (1 - q^-T) / (q - 1)
    return t * log_q + std::log1p(-std::exp(-t * log_q)) - std::log(q - 1.0);
  }
  return std::log1p(-std::exp(t * log_q)) - std::log1p(-q);
}

ExcessRiskBound excess_risk_bound_sgd(const BoundInputs& in) {
  in.validate();
  ExcessRiskBound out;
  fill_terms(in, 1.0, 0.0, in.c * in.psi(), out);
  return out;
}

ExcessRiskBound excess_risk_bound_fosm(const BoundInputs& in) {
  in.validate();
  ExcessRiskBound out;
  const double T = static_cast<double>(in.T);
  const double beta_minus = 1.0 - std::pow(in.beta, T);
  const double log_beta_plus = T * std::log1p(in.beta);
  fill_terms(in, beta_minus, log_beta_plus, in.nu * in.nu * in.c * in.psi(), out);
  out.log_psi_beta = log_psi_beta(in.beta, in.T);
  return out;
}

Envelope assemble_excess_envelope(const BoundInputs& in, const std::vector<double>& s,
                                  const std::vector<double>& g) {
  if (!(in.gamma > 0.0)) throw ConfigError("bounds: gamma must be > 0");
  if (s.size() != g.size()) throw PreconditionError("envelope curves differ in length");
  if (s.empty()) throw PreconditionError("envelope curves are empty");
  const double ws = (in.L + in.gamma) / 2.0;
  const double wg = 1.0 / (2.0 * in.gamma) + in.C;
  Envelope out;
  out.value.resize(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    out.value[t] = ws * s[t] + wg * g[t];
    if (out.value[t] < out.value[out.argmin]) out.argmin = t;
  }
  return out;
}

}  // namespace fedstab
