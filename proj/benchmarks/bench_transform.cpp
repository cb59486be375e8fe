// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "sbse/transform.hpp"

namespace {

sbse::TimeSignal noise(std::size_t n) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd(0.0, 0.1);
  sbse::TimeSignal s;
  s.samples.resize(n);
  for (double& v : s.samples) v = nd(gen);
  return s;
}

void BM_Analyze(benchmark::State& state) {
  const sbse::TransformConfig cfg;
  const sbse::TimeSignal x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sbse::analyze(x, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->Arg(16000)->Arg(64000);

void BM_Synthesize(benchmark::State& state) {
  const sbse::TransformConfig cfg;
  const sbse::ComplexSpectrogram spec =
      sbse::analyze(noise(static_cast<std::size_t>(state.range(0))), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sbse::synthesize(spec, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Synthesize)->Arg(16000)->Arg(64000);

}  // namespace
