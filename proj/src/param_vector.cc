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

#include "fedstab/param_vector.h"

#include <cassert>
#include <cmath>
#include <cstring>

namespace fedstab {

ParamVector& ParamVector::add_scaled(const ParamVector& other, double alpha) {
  assert(other.size() == size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  assert(other.size() == size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  assert(other.size() == size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector& ParamVector::scale(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

double ParamVector::squared_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc;
}

double ParamVector::dot(const ParamVector& other) const {
  assert(other.size() == size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
  return acc;
}

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ParamVector operator-(const ParamVector& a, const ParamVector& b) {
  ParamVector out = a;
  out -= b;
  return out;
}

double squared_distance(const ParamVector& a, const ParamVector& b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

bool bitwise_equal(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) return false;
  if (a.size() == 0) return true;
  return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace fedstab
