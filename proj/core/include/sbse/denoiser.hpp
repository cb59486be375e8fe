// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "sbse/transform.hpp"

namespace sbse {

/// Data-prediction model: estimates the clean coefficients from the current
/// state x_t, the observation y and the process time t. Implementations must
/// be reentrant; estimate() is called from concurrent samplers.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual ComplexSpectrogram estimate(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                                      double t) const = 0;
};

/// Returns the bound clean coefficients regardless of its inputs.
class OracleDenoiser final : public Denoiser {
 public:
  explicit OracleDenoiser(ComplexSpectrogram clean) : clean_(std::move(clean)) {}
  ComplexSpectrogram estimate(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                              double t) const override;

 private:
  ComplexSpectrogram clean_;
};

/// Returns a fixed constant; with the observation as constant it is the
/// identity-on-y stub.
class StubDenoiser final : public Denoiser {
 public:
  explicit StubDenoiser(ComplexSpectrogram constant) : constant_(std::move(constant)) {}
  ComplexSpectrogram estimate(const ComplexSpectrogram& x_t, const ComplexSpectrogram& y,
                              double t) const override;

 private:
  ComplexSpectrogram constant_;
};

std::unique_ptr<Denoiser> oracle_denoiser(ComplexSpectrogram clean);
std::unique_ptr<Denoiser> stub_denoiser(ComplexSpectrogram constant);

}  // namespace sbse
