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

#ifndef FEDSTAB_PARAM_VECTOR_H_
#define FEDSTAB_PARAM_VECTOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedstab {

// Flat f64 parameter vector. Every reduction runs left to right over the
// coordinates so results are bit-reproducible.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  ParamVector(std::initializer_list<double> init) : values_(init) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  // this += alpha * other
  ParamVector& add_scaled(const ParamVector& other, double alpha);
  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& scale(double alpha);

  double squared_norm() const;
  double dot(const ParamVector& other) const;
  bool all_finite() const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

ParamVector operator-(const ParamVector& a, const ParamVector& b);
double squared_distance(const ParamVector& a, const ParamVector& b);

// Byte-level equality; distinguishes +0.0 from -0.0 and compares NaN payloads.
bool bitwise_equal(const ParamVector& a, const ParamVector& b);

}  // namespace fedstab

#endif  // FEDSTAB_PARAM_VECTOR_H_
