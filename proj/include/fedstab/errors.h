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

#ifndef FEDSTAB_ERRORS_H_
#define FEDSTAB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fedstab {

// Invalid sizes, unknown keys, out-of-range hyperparameters. Maps to exit 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller violated a documented precondition (empty list, index out of range).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN/Inf or divergence during evaluation. Maps to exit 1.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The message carries the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedstab

#endif  // FEDSTAB_ERRORS_H_
