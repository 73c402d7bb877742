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

#ifndef CONCEPT_FORGE_RANDOM_HPP_
#define CONCEPT_FORGE_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace concept_forge {

using Rng = std::mt19937_64;

// Stream tags keep independent consumers of one seed from sharing draws.
enum class StreamTag : std::uint64_t {
  kScene = 1,
  kMentions = 2,
  kUnaryLogit = 3,
  kBinaryLogit = 4,
  kFeatureNoise = 5,
  kFeatureTemplate = 6,
  kQuestion = 7,
  kTopUp = 8,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, StreamTag tag,
                                 std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Sequential engine for a (seed, tag, index) stream.
inline Rng make_rng(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::uint64_t k = hash_key(seed, tag, {index});
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

// Standard normal draw that is a pure function of its key, so the same
// (scene, object, word) cell yields the same value no matter which thread or
// pass asks for it.
double keyed_standard_normal(std::uint64_t key) noexcept;

// Uniform in [0, 1) from a key.
double keyed_uniform(std::uint64_t key) noexcept;

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_RANDOM_HPP_
