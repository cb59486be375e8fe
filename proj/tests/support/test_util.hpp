// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "sbse/transform.hpp"

namespace sbse::testing {

// Test-side randomness stays on std:: engines so fixtures do not depend on
// the library's own Rng.
inline ComplexSpectrogram random_spec(int bins, int frames, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, scale);
  ComplexSpectrogram s(bins, frames);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = {n(gen), n(gen)};
  return s;
}

inline TimeSignal random_signal(std::size_t n, std::uint64_t seed, double scale = 0.3) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  TimeSignal s;
  s.samples.resize(n);
  for (double& v : s.samples) v = dist(gen);
  return s;
}

inline double rel_error(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double max_abs_diff(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sbse_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace sbse::testing
