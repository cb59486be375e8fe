// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/denoiser.hpp"

namespace sbse {

ComplexSpectrogram OracleDenoiser::estimate(const ComplexSpectrogram& x_t,
                                            const ComplexSpectrogram& /*y*/, double /*t*/) const {
  clean_.require_same_shape(x_t, "oracle denoiser");
  return clean_;
}

ComplexSpectrogram StubDenoiser::estimate(const ComplexSpectrogram& x_t,
                                          const ComplexSpectrogram& /*y*/, double /*t*/) const {
  constant_.require_same_shape(x_t, "stub denoiser");
  return constant_;
}

std::unique_ptr<Denoiser> oracle_denoiser(ComplexSpectrogram clean) {
  return std::make_unique<OracleDenoiser>(std::move(clean));
}

std::unique_ptr<Denoiser> stub_denoiser(ComplexSpectrogram constant) {
  return std::make_unique<StubDenoiser>(std::move(constant));
}

}  // namespace sbse
