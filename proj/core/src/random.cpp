// Copyright 2026 The Concept Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "concept_forge/random.hpp"

#include <cmath>
#include <numbers>

namespace concept_forge {

double keyed_uniform(std::uint64_t key) noexcept {
  // 53 random mantissa bits.
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

double keyed_standard_normal(std::uint64_t key) noexcept {
  // Box-Muller; u1 is shifted into (0, 1] so the log stays finite.
  double u1 = 1.0 - keyed_uniform(key);
  double u2 = keyed_uniform(key ^ 0xd6e8feb86659fd93ULL);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace concept_forge
