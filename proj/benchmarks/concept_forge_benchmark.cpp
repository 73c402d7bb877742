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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "concept_forge/bit_matrix.hpp"
#include "concept_forge/gmm.hpp"
#include "concept_forge/hierarchy.hpp"
#include "concept_forge/pipeline.hpp"

namespace {

using namespace concept_forge;

std::vector<double> mixture(std::size_t n) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> lo(-3, 1);
  std::normal_distribution<double> hi(3, 1);
  std::vector<double> s(n);
  for (auto& x : s) x = coin(rng) ? lo(rng) : hi(rng);
  return s;
}

void BM_FitEm(benchmark::State& state) {
  const auto samples = mixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_em(samples, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitEm)->Arg(1000)->Arg(20000);

BitMatrix random_rows(std::size_t cols) {
  std::mt19937_64 rng(2);
  BitMatrix m(2, cols);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() & 1) m.set(r, c);
    }
  }
  return m;
}

void BM_AndPopcount(benchmark::State& state) {
  const auto m = random_rows(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(m.and_popcount(0, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AndPopcount)->Arg(4096)->Arg(1 << 20);

void BM_WordCorrelation(benchmark::State& state) {
  const auto m = random_rows(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(word_correlation(m, 0, 1));
}
BENCHMARK(BM_WordCorrelation)->Arg(1 << 20);

void BM_GenerateAndInduce(benchmark::State& state) {
  RunConfig cfg;
  cfg.ontology.generation.scenes = static_cast<std::size_t>(state.range(0));
  cfg.noise.sigma = 1.0;
  for (auto _ : state) {
    Workspace ws(cfg);
    Corpus corpus = ws.generate();
    benchmark::DoNotOptimize(ws.induce(corpus));
  }
}
BENCHMARK(BM_GenerateAndInduce)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
