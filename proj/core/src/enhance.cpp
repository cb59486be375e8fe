// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/enhance.hpp"

#include "sbse/error.hpp"
#include "sbse/train.hpp"

namespace sbse {

namespace {

TimeSignal scaled(const TimeSignal& x, double g) {
  TimeSignal out = x;
  for (double& v : out.samples) v *= g;
  return out;
}

}  // namespace

EnhanceResult enhance(const TimeSignal& noisy, const Denoiser& denoiser, const SamplerConfig& sampler,
                      const Schedule& s, const TransformConfig& transform,
                      const StepObserver& observer) {
  noisy.validate();
  EnhanceResult r;
  r.scale = peak_normalization_scale(noisy);
  const ComplexSpectrogram y = analyze(scaled(noisy, r.scale), transform);
  r.output_spec = run_reverse(y, denoiser, sampler, s, observer);
  r.output = scaled(synthesize(r.output_spec, transform), 1.0 / r.scale);
  return r;
}

EnhanceResult enhance_oracle(const TimeSignal& noisy, const TimeSignal& clean,
                             const SamplerConfig& sampler, const Schedule& s,
                             const TransformConfig& transform, const StepObserver& observer) {
  if (clean.size() != noisy.size()) throw DataError("oracle enhancement: clean/noisy lengths differ");
  const double g = peak_normalization_scale(noisy);
  const auto oracle = oracle_denoiser(analyze(scaled(clean, g), transform));
  return enhance(noisy, *oracle, sampler, s, transform, observer);
}

}  // namespace sbse
