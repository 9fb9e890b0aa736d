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

#ifndef FEDSTAB_OUTPUT_H_
#define FEDSTAB_OUTPUT_H_

#include <string>
#include <vector>

#include "fedstab/bounds.h"
#include "fedstab/engine.h"
#include "fedstab/probe.h"

namespace fedstab {

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kMetricsHeader =
    "t,train_loss,test_loss,grad_norm_sq,gen_gap,excess_risk,stability_sq,eta_g_t";
inline constexpr const char* kProbeHeader =
    "t,mean_sq_dist,stderr,grad_norm_sq,gen_gap,excess_risk";
inline constexpr const char* kEnvelopeHeader =
    "t,convergence_sqrt,convergence_linear,stability,optimization,total";
inline constexpr const char* kRecursionHeader =
    "t,sgd_exact,sgd_relaxed,closed_form_sgd,fosm";

// One row per recorded round; stability_sq left empty when absent.
std::string metrics_row(const RoundMetrics& m);
std::string metrics_csv(const std::vector<RoundMetrics>& metrics);

// Rows t = 0..T; metric columns filled on rounds present in `metrics`.
std::string probe_csv(const StabilityCurve& curve, const std::vector<RoundMetrics>& metrics);

// Envelope rows for horizons t = every, 2 * every, ..., T (and T itself).
std::string envelope_csv(BoundInputs inputs, bool momentum, std::size_t every);
std::string recursion_csv(const BoundInputs& inputs, const StepSchedule& schedule,
                          std::size_t every);

// Writes text to path, creating parent directories. Throws on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace fedstab

#endif  // FEDSTAB_OUTPUT_H_
