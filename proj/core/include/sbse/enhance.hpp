// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbse/bridge.hpp"
#include "sbse/denoiser.hpp"
#include "sbse/transform.hpp"

namespace sbse {

struct EnhanceResult {
  TimeSignal output;
  ComplexSpectrogram output_spec;  // normalized coefficients at t = 0
  double scale = 1.0;              // peak normalization factor of the input
};

/// Peak-normalizes the input, analyzes it, runs the reverse process and
/// resynthesizes at the original level.
EnhanceResult enhance(const TimeSignal& noisy, const Denoiser& denoiser, const SamplerConfig& sampler,
                      const Schedule& s, const TransformConfig& transform,
                      const StepObserver& observer = {});

/// Same, with the oracle denoiser bound to the clean reference (normalized
/// with the noisy input's factor).
EnhanceResult enhance_oracle(const TimeSignal& noisy, const TimeSignal& clean,
                             const SamplerConfig& sampler, const Schedule& s,
                             const TransformConfig& transform, const StepObserver& observer = {});

}  // namespace sbse
