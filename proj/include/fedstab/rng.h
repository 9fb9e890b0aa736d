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

#ifndef FEDSTAB_RNG_H_
#define FEDSTAB_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace fedstab {

using Rng = std::mt19937_64;

// Hierarchical seed derivation: a child seed is a pure function of the parent
// seed and a label. Engines never share a generator, they derive one per
// (purpose, round, client, step).
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t label);
std::uint64_t mix_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> labels);
std::uint64_t label_of(std::string_view name);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

namespace stream {
// Top-level labels under the run seed.
inline constexpr std::uint64_t kParticipation = 0x7061727469636970ULL;
inline constexpr std::uint64_t kLocal = 0x6c6f63616c736764ULL;
inline constexpr std::uint64_t kInit = 0x696e6974706172ULL;
inline constexpr std::uint64_t kData = 0x6461746167656eULL;
inline constexpr std::uint64_t kPartition = 0x646972696368ULL;
inline constexpr std::uint64_t kNeighbor = 0x6e65696768ULL;
inline constexpr std::uint64_t kTest = 0x74657374ULL;
inline constexpr std::uint64_t kProbe = 0x70726f6265ULL;
}  // namespace stream

}  // namespace fedstab

#endif  // FEDSTAB_RNG_H_
