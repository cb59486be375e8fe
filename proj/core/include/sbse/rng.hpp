// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>

namespace sbse {

/// Mixes a master seed with a stream index (splitmix64 finalizer). Used to
/// give every utterance / example an independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic random source with serializable state.
///
/// Gaussians are drawn with the Box-Muller transform implemented here rather
/// than std::normal_distribution, so sequences depend only on the engine and
/// not on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t index(std::uint64_t n);
  /// Standard real normal N(0, 1).
  double normal();

  /// Engine state plus the cached Box-Muller deviate.
  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Circularly-symmetric complex Gaussian draws: real and imaginary parts are
/// i.i.d. N(0, 1/2), so E|z|^2 = 1 per component.
class ComplexGaussianSampler {
 public:
  explicit ComplexGaussianSampler(std::uint64_t seed = 0) : rng_(seed) {}

  std::complex<double> operator()();

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

}  // namespace sbse
