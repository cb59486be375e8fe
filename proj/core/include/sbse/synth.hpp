// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sbse/rng.hpp"
#include "sbse/transform.hpp"

namespace sbse {

enum class Task { kDenoise, kDereverb };
enum class CleanKind { kHarmonic, kChirp, kAR2 };
enum class NoiseKind { kWhite, kPink };

std::string to_string(Task t);
std::string to_string(CleanKind k);
std::string to_string(NoiseKind k);
Task task_from_string(const std::string& s);
CleanKind clean_kind_from_string(const std::string& s);
NoiseKind noise_kind_from_string(const std::string& s);

/// Closed interval [lo, hi]; lo == hi is a valid point interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

struct DatasetSpec {
  Task task = Task::kDenoise;
  int n_examples = 8;
  double duration_s = 2.0;
  Interval snr_range_db{-6.0, 14.0};
  Interval t60_range_s{0.4, 1.0};
  CleanKind clean_kind = CleanKind::kHarmonic;
  NoiseKind noise_kind = NoiseKind::kWhite;
  std::uint64_t master_seed = 0;
  int sample_rate = 16000;
  /// Optional directories of user WAV files replacing the synthetic clean
  /// signals and noises. Files are used in sorted path order.
  std::optional<std::filesystem::path> clean_dir;
  std::optional<std::filesystem::path> noise_dir;

  std::size_t num_samples() const;
  /// Throws ConfigError on empty/inverted ranges, duration < 1 s, etc.
  void validate() const;
  bool operator==(const DatasetSpec&) const = default;
};

struct ExampleMeta {
  Task task = Task::kDenoise;
  double snr_db = 0.0;  // denoise only
  double t60_s = 0.0;   // dereverb only
  std::uint64_t seed = 0;

  bool operator==(const ExampleMeta&) const = default;
};

struct PairedExample {
  TimeSignal clean;
  TimeSignal degraded;
  ExampleMeta meta;

  /// Equal lengths and rates, finite samples.
  void validate() const;
};

/// Independent seed streams of one example.
enum class Stream : std::uint64_t { kClean = 1, kNoise = 2, kParams = 3, kRir = 4 };
std::uint64_t example_seed(std::uint64_t master_seed, std::size_t index);
std::uint64_t stream_seed(std::uint64_t example_seed, Stream s);

/// Synthetic clean signal of the spec's kind, peak-normalized to 0.5.
TimeSignal gen_clean(const DatasetSpec& spec, std::size_t index);
TimeSignal gen_clean(CleanKind kind, std::size_t num_samples, int sample_rate, std::uint64_t seed);

/// Unit-variance white or pink (1/f) noise.
TimeSignal gen_noise(NoiseKind kind, std::size_t num_samples, int sample_rate, std::uint64_t seed);

/// degraded = clean + c * noise with c chosen so the full-utterance SNR
/// equals snr_db. Throws DataError on zero-energy inputs or length mismatch.
PairedExample mix_noise(const TimeSignal& clean, const TimeSignal& noise, double snr_db);

/// Exponentially decaying noise RIR with a unit direct-path tap at t = 0.
/// The tail's energy envelope falls 60 dB at t = t60_s; its energy relative
/// to the direct tap is (t60_s / 0.7)^3, so short rooms approach the
/// anechoic response.
TimeSignal gen_rir(double t60_s, double length_s, std::uint64_t seed, int sample_rate = 16000);

/// degraded = clean * rir truncated to the clean length; the target is the
/// clean signal convolved with the direct path only, i.e. the clean signal.
PairedExample apply_reverb(const TimeSignal& clean, const TimeSignal& rir);

/// Full linear convolution.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

/// T60 estimated from the Schroeder backward-integrated energy of the RIR
/// tail (direct tap excluded), fitted between -5 and -35 dB.
double estimate_t60(const TimeSignal& rir);

/// Warning text when t60 lies outside the spec's configured range.
std::optional<std::string> t60_range_warning(const DatasetSpec& spec, double t60_s);

}  // namespace sbse
