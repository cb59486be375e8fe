// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sbse/error.hpp"

namespace sbse {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ConfigError("Rng::index: empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

std::string Rng::state() const {
  std::ostringstream os;
  os.precision(17);
  os << engine_ << ' ' << (has_cached_ ? 1 : 0) << ' ' << std::hexfloat << cached_;
  return os.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  int cached_flag = 0;
  std::string cached_text;
  is >> engine_ >> cached_flag >> cached_text;
  if (!is && !is.eof()) throw DataError("Rng::set_state: malformed state");
  has_cached_ = cached_flag != 0;
  cached_ = std::strtod(cached_text.c_str(), nullptr);
}

std::complex<double> ComplexGaussianSampler::operator()() {
  const double re = rng_.normal();
  const double im = rng_.normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace sbse
