// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "sbse/bridge.hpp"
#include "sbse/denoiser.hpp"

namespace {

sbse::ComplexSpectrogram spec(int frames, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.3);
  sbse::ComplexSpectrogram s(256, frames);
  for (sbse::cplx& c : s.values()) c = {nd(gen), nd(gen)};
  return s;
}

// Sampler overhead without a network: the oracle denoiser is a copy.
void BM_ReverseOracle(benchmark::State& state) {
  const sbse::ComplexSpectrogram x = spec(250, 1), y = spec(250, 2);
  const sbse::OracleDenoiser oracle(x);
  const auto kind = static_cast<sbse::SamplerKind>(state.range(0));
  const sbse::SamplerConfig cfg{kind, static_cast<int>(state.range(1)), 1e-4, 0};
  const sbse::Schedule s = sbse::Schedule::sb_ve();
  for (auto _ : state) benchmark::DoNotOptimize(sbse::run_reverse(y, oracle, cfg, s));
  state.SetLabel(sbse::to_string(kind));
}
BENCHMARK(BM_ReverseOracle)
    ->Args({static_cast<int>(sbse::SamplerKind::kSBSDE), 50})
    ->Args({static_cast<int>(sbse::SamplerKind::kSBODE), 50})
    ->Unit(benchmark::kMillisecond);

void BM_SdeStep(benchmark::State& state) {
  const sbse::ComplexSpectrogram x = spec(250, 1), y = spec(250, 2);
  const sbse::Schedule s = sbse::Schedule::sb_ve();
  sbse::ComplexGaussianSampler rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(sbse::sde_step({y, 0.6}, x, 0.58, s, rng));
}
BENCHMARK(BM_SdeStep);

}  // namespace
