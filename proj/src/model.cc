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

#include "fedstab/model.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fedstab/errors.h"
#include "fedstab/rng.h"

namespace fedstab {
namespace {

void check_inputs(const ModelSpec& spec, const ParamVector& params, const Batch& batch) {
  if (params.size() != spec.param_dim()) {
    std::ostringstream msg;
    msg << "parameter dimension " << params.size() << " does not match model dimension "
        << spec.param_dim();
    throw ConfigError(msg.str());
  }
  if (batch.size() == 0) throw PreconditionError("loss/grad called on an empty batch");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].features.size() != spec.input_dim) {
      std::ostringstream msg;
      msg << "example " << batch.indices[i] << " has " << batch[i].features.size()
          << " features, model expects " << spec.input_dim;
      throw ConfigError(msg.str());
    }
  }
}

void check_finite(double value, const char* what, std::size_t batch_size) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite " << what << " over a batch of " << batch_size << " examples";
    throw NumericError(msg.str());
  }
}

double linear_score(const ModelSpec& spec, std::span<const double> w,
                    const std::vector<double>& x) {
  double z = 0.0;
  for (std::size_t k = 0; k < spec.input_dim; ++k) z += w[k] * x[k];
  if (spec.bias) z += w[spec.input_dim];
  return z;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Offsets into the flat mlp vector: W1 [h x in], b1 [h], W2 [C x h], b2 [C].
struct MlpLayout {
  std::size_t in, hidden, classes;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * in; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + classes * hidden; }
};

// Per-example forward pass. Returns the loss; when `g` is non-null the
// gradient of the loss is accumulated into it.
double mlp_example(const MlpLayout& lay, std::span<const double> p, const Example& ex,
                   std::vector<double>& hidden, std::vector<double>& logits, double* g) {
  const auto& x = ex.features;
  for (std::size_t h = 0; h < lay.hidden; ++h) {
    double a = p[lay.b1() + h];
    const double* row = &p[lay.w1() + h * lay.in];
    for (std::size_t k = 0; k < lay.in; ++k) a += row[k] * x[k];
    hidden[h] = std::tanh(a);
  }
  double max_logit = -INFINITY;
  for (std::size_t c = 0; c < lay.classes; ++c) {
    double o = p[lay.b2() + c];
    const double* row = &p[lay.w2() + c * lay.hidden];
    for (std::size_t h = 0; h < lay.hidden; ++h) o += row[h] * hidden[h];
    logits[c] = o;
    max_logit = std::max(max_logit, o);
  }
  double sum_exp = 0.0;
  for (std::size_t c = 0; c < lay.classes; ++c) sum_exp += std::exp(logits[c] - max_logit);
  const double log_z = max_logit + std::log(sum_exp);
  const std::size_t y = ex.class_id();
  const double value = log_z - logits[y];
  if (g == nullptr) return value;

  // dL/do = softmax - onehot, reused in place of `logits`.
  for (std::size_t c = 0; c < lay.classes; ++c) {
    logits[c] = std::exp(logits[c] - log_z) - (c == y ? 1.0 : 0.0);
  }
  for (std::size_t c = 0; c < lay.classes; ++c) {
    double* row = g + lay.w2() + c * lay.hidden;
    for (std::size_t h = 0; h < lay.hidden; ++h) row[h] += logits[c] * hidden[h];
    g[lay.b2() + c] += logits[c];
  }
  for (std::size_t h = 0; h < lay.hidden; ++h) {
    double back = 0.0;
    for (std::size_t c = 0; c < lay.classes; ++c) back += p[lay.w2() + c * lay.hidden + h] * logits[c];
    const double da = back * (1.0 - hidden[h] * hidden[h]);
    double* row = g + lay.w1() + h * lay.in;
    for (std::size_t k = 0; k < lay.in; ++k) row[k] += da * x[k];
    g[lay.b1() + h] += da;
  }
  return value;
}

// Sum of per-example data losses; gradient sum accumulated into `g` if given.
double data_term(const ModelSpec& spec, const ParamVector& params, const Batch& batch,
                 double* g) {
  const auto p = params.span();
  double total = 0.0;
  switch (spec.family) {
    case ModelFamily::kLinearRegression:
    case ModelFamily::kLogistic: {
      const bool logistic = spec.family == ModelFamily::kLogistic;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const Example& ex = batch[i];
        const double z = linear_score(spec, p, ex.features);
        double slope;
        if (logistic) {
          total += softplus(z) - ex.label * z;
          slope = sigmoid(z) - ex.label;
        } else {
          const double r = z - ex.label;
          total += 0.5 * r * r;
          slope = r;
        }
        if (g != nullptr) {
          for (std::size_t k = 0; k < spec.input_dim; ++k) g[k] += slope * ex.features[k];
          if (spec.bias) g[spec.input_dim] += slope;
        }
      }
      break;
    }
    case ModelFamily::kMlp: {
      const MlpLayout lay{spec.input_dim, spec.hidden_dim, spec.num_classes};
      std::vector<double> hidden(lay.hidden), logits(lay.classes);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        total += mlp_example(lay, p, batch[i], hidden, logits, g);
      }
      break;
    }
  }
  return total;
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLinearRegression:
      return "linear";
    case ModelFamily::kLogistic:
      return "logistic";
    case ModelFamily::kMlp:
      return "mlp";
  }
  return "?";
}

ModelFamily parse_model_family(std::string_view name) {
  if (name == "linear" || name == "linear-regression") return ModelFamily::kLinearRegression;
  if (name == "logistic" || name == "logistic-regression") return ModelFamily::kLogistic;
  if (name == "mlp" || name == "one-hidden-layer-mlp") return ModelFamily::kMlp;
  throw ConfigError("unknown model family '" + std::string(name) + "'");
}

std::size_t ModelSpec::param_dim() const {
  switch (family) {
    case ModelFamily::kLinearRegression:
    case ModelFamily::kLogistic:
      return input_dim + (bias ? 1 : 0);
    case ModelFamily::kMlp:
      return hidden_dim * input_dim + hidden_dim + num_classes * hidden_dim + num_classes;
  }
  return 0;
}

void ModelSpec::validate() const {
  if (input_dim == 0) throw ConfigError("model input_dim must be >= 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("model weight_decay must be a finite nonnegative number");
  }
  if (family == ModelFamily::kMlp) {
    if (hidden_dim == 0) throw ConfigError("mlp hidden_dim must be >= 1");
    if (num_classes < 2) throw ConfigError("mlp num_classes must be >= 2");
  }
}

double loss(const ModelSpec& spec, const ParamVector& params, const Batch& batch) {
  check_inputs(spec, params, batch);
  const double data = data_term(spec, params, batch, nullptr) / static_cast<double>(batch.size());
  const double value = data + 0.5 * spec.weight_decay * params.squared_norm();
  check_finite(value, "loss", batch.size());
  return value;
}

double loss(const ModelSpec& spec, const ParamVector& params, std::span<const Example> examples) {
  const auto idx = iota_indices(examples.size());
  return loss(spec, params, Batch{examples, idx});
}

ParamVector grad(const ModelSpec& spec, const ParamVector& params, const Batch& batch) {
  check_inputs(spec, params, batch);
  ParamVector g(params.size());
  data_term(spec, params, batch, g.span().data());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = g[k] * inv_n + spec.weight_decay * params[k];
  }
  check_finite(g.squared_norm(), "gradient", batch.size());
  return g;
}

ParamVector grad(const ModelSpec& spec, const ParamVector& params,
                 std::span<const Example> examples) {
  const auto idx = iota_indices(examples.size());
  return grad(spec, params, Batch{examples, idx});
}

ParamVector sample_grad(const ModelSpec& spec, const ParamVector& params, const Example& example) {
  const std::size_t zero = 0;
  const Batch one{std::span<const Example>(&example, 1), std::span<const std::size_t>(&zero, 1)};
  check_inputs(spec, params, one);
  ParamVector g(params.size());
  data_term(spec, params, one, g.span().data());
  return g;
}

ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params, const Batch& batch,
                             double step) {
  if (!(step > 0.0)) throw PreconditionError("finite difference step must be > 0");
  ParamVector probe = params;
  ParamVector g(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double original = probe[k];
    probe[k] = original + step;
    const double up = loss(spec, probe, batch);
    probe[k] = original - step;
    const double down = loss(spec, probe, batch);
    probe[k] = original;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params,
                             std::span<const Example> examples, double step) {
  const auto idx = iota_indices(examples.size());
  return finite_diff_grad(spec, params, Batch{examples, idx}, step);
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector x(spec.param_dim());
  if (spec.family != ModelFamily::kMlp) return x;
  Rng rng = make_rng(mix_seed(seed, stream::kInit));
  const MlpLayout lay{spec.input_dim, spec.hidden_dim, spec.num_classes};
  const double a1 = std::sqrt(6.0 / static_cast<double>(lay.in + lay.hidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(lay.hidden + lay.classes));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  for (std::size_t k = 0; k < lay.hidden * lay.in; ++k) x[lay.w1() + k] = u1(rng);
  for (std::size_t k = 0; k < lay.classes * lay.hidden; ++k) x[lay.w2() + k] = u2(rng);
  return x;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace fedstab
