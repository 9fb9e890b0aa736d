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

#ifndef FEDSTAB_TEXT_H_
#define FEDSTAB_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace fedstab {

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

// Whole-string parse; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

std::string trim(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace fedstab

#endif  // FEDSTAB_TEXT_H_
