// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "sbse/tiny_denoiser.hpp"
#include "sbse/train.hpp"

namespace {

sbse::ComplexSpectrogram spec(int frames, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.3);
  sbse::ComplexSpectrogram s(256, frames);
  for (sbse::cplx& c : s.values()) c = {nd(gen), nd(gen)};
  return s;
}

void BM_TinyDenoiserForward(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const sbse::ComplexSpectrogram x = spec(frames, 1), y = spec(frames, 2);
  const sbse::TinyDenoiser model{sbse::TinyDenoiserConfig{}};
  for (auto _ : state) benchmark::DoNotOptimize(model.estimate(x, y, 0.5));
  state.SetItemsProcessed(state.iterations() * 256 * frames);
}
BENCHMARK(BM_TinyDenoiserForward)->Arg(64)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_LossAndGradient(benchmark::State& state) {
  sbse::TrainConfig cfg;
  cfg.aux_kind = sbse::AuxLossKind::kNone;
  cfg.lambda_aux = 0.0;
  const sbse::TinyDenoiser model{sbse::TinyDenoiserConfig{}};
  const sbse::TrainingItem item = sbse::make_training_item(spec(64, 1), spec(64, 2), 0.4, spec(64, 3), cfg);
  const sbse::Schedule s = sbse::Schedule::sb_ve();
  std::vector<double> grad(model.num_parameters());
  for (auto _ : state) benchmark::DoNotOptimize(sbse::loss_and_gradient(model, item, s, cfg, grad));
}
BENCHMARK(BM_LossAndGradient)->Unit(benchmark::kMillisecond);

}  // namespace
