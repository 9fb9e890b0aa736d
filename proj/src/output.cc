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

#include "fedstab/output.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fedstab/errors.h"
#include "fedstab/text.h"

namespace fedstab {
namespace {

std::vector<std::size_t> horizons(std::size_t T, std::size_t every) {
  std::vector<std::size_t> out;
  for (std::size_t t = every; t < T; t += every) out.push_back(t);
  out.push_back(T);
  return out;
}

}  // namespace

std::string metrics_row(const RoundMetrics& m) {
  std::string row = std::to_string(m.t);
  for (double v : {m.train_loss, m.test_loss, m.grad_norm_sq, m.gen_gap, m.excess_risk}) {
    row += ',' + format_double(v);
  }
  row += ',';
  if (m.stability_sq) row += format_double(*m.stability_sq);
  row += ',' + format_double(m.eta_g_t);
  return row;
}

std::string metrics_csv(const std::vector<RoundMetrics>& metrics) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& m : metrics) out += metrics_row(m) + "\n";
  return out;
}

std::string probe_csv(const StabilityCurve& curve, const std::vector<RoundMetrics>& metrics) {
  std::map<std::size_t, const RoundMetrics*> by_round;
  for (const auto& m : metrics) by_round[m.t] = &m;
  std::string out = std::string(kProbeHeader) + "\n";
  for (std::size_t t = 0; t < curve.mean_sq_dist.size(); ++t) {
    out += std::to_string(t) + ',' + format_double(curve.mean_sq_dist[t]) + ',' +
           format_double(curve.std_error[t]);
    auto it = by_round.find(t);
    if (it != by_round.end()) {
      out += ',' + format_double(it->second->grad_norm_sq) + ',' +
             format_double(it->second->gen_gap) + ',' + format_double(it->second->excess_risk);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

std::string envelope_csv(BoundInputs inputs, bool momentum, std::size_t every) {
  const std::size_t T = inputs.T;
  std::string out = std::string(kEnvelopeHeader) + "\n";
  for (std::size_t t : horizons(T, every)) {
    inputs.T = t;
    const ExcessRiskBound e = momentum ? excess_risk_bound_fosm(inputs) : excess_risk_bound_sgd(inputs);
    out += std::to_string(t);
    for (double v : {e.convergence_sqrt, e.convergence_linear, e.stability, e.optimization, e.total}) {
      out += ',' + format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string recursion_csv(const BoundInputs& inputs, const StepSchedule& schedule,
                          std::size_t every) {
  const auto exact = stability_recursion_sgd(inputs, schedule, RecursionVariant::kExact).s;
  const auto relaxed = stability_recursion_sgd(inputs, schedule, RecursionVariant::kRelaxed).s;
  const auto fosm = stability_recursion_fosm(inputs, schedule).s;
  std::string out = std::string(kRecursionHeader) + "\n";
  BoundInputs at = inputs;
  for (std::size_t t : horizons(inputs.T, every)) {
    at.T = t;
    out += std::to_string(t) + ',' + format_double(exact[t]) + ',' + format_double(relaxed[t]) +
           ',' + format_double(stability_closed_form_sgd(at)) + ',' + format_double(fosm[t]) + '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace fedstab
