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

#include "concept_forge/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace concept_forge {

std::size_t worker_count() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("CONCEPT_FORGE_THREADS");
  if (env == nullptr) return hw;
  std::size_t cap = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
  if (ec != std::errc() || cap == 0) return hw;
  return std::min(cap, hw);
}

}  // namespace concept_forge
