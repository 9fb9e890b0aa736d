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

#ifndef FEDSTAB_MODEL_H_
#define FEDSTAB_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedstab/param_vector.h"

namespace fedstab {

// One sample z. For classification `label` holds the class id as an exact
// small integer; for regression it is the real-valued target.
struct Example {
  std::vector<double> features;
  double label = 0.0;

  std::size_t class_id() const { return static_cast<std::size_t>(label); }
  friend bool operator==(const Example&, const Example&) = default;
};

enum class ModelFamily {
  kLinearRegression,  // 0.5 * (w.x + b - y)^2
  kLogistic,          // binary cross-entropy, labels in {0, 1}
  kMlp,               // tanh hidden layer, softmax cross-entropy
};

std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

struct ModelSpec {
  ModelFamily family = ModelFamily::kLinearRegression;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 0;   // mlp only
  std::size_t num_classes = 2;  // mlp only; logistic is always binary
  double weight_decay = 0.0;
  bool bias = true;             // linear / logistic intercept term

  // Parameter count d, a pure function of the spec.
  std::size_t param_dim() const;
  void validate() const;
};

// A mini-batch is a list of row indices into an example pool. Reductions run
// over the indices in the given order.
struct Batch {
  std::span<const Example> pool;
  std::span<const std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  const Example& operator[](std::size_t i) const { return pool[indices[i]]; }
};

// Mean loss over the batch plus 0.5 * weight_decay * |x|^2.
double loss(const ModelSpec& spec, const ParamVector& params, const Batch& batch);
double loss(const ModelSpec& spec, const ParamVector& params,
            std::span<const Example> examples);

// Exact gradient of `loss`, weight decay included.
ParamVector grad(const ModelSpec& spec, const ParamVector& params, const Batch& batch);
ParamVector grad(const ModelSpec& spec, const ParamVector& params,
                 std::span<const Example> examples);

// Gradient of the data term only (no weight decay) for a single example.
// Used by variance estimators where the shared decay term cancels.
ParamVector sample_grad(const ModelSpec& spec, const ParamVector& params,
                        const Example& example);

// Central differences, one pair of loss evaluations per coordinate.
ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params,
                             const Batch& batch, double step);
ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params,
                             std::span<const Example> examples, double step);

// Zeros for linear/logistic; Xavier-uniform weights and zero biases for mlp.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Identity index list 0..n-1.
std::vector<std::size_t> iota_indices(std::size_t n);

}  // namespace fedstab

#endif  // FEDSTAB_MODEL_H_
