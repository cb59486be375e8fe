// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "sbse/error.hpp"

namespace sbse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCleanPeak = 0.5;

void peak_normalize(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return;
  const double g = peak / m;
  for (double& v : x) v *= g;
}

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

std::vector<double> harmonic(std::size_t n, double fs, Rng& rng) {
  const double f0_start = rng.uniform(100.0, 300.0);
  const double f0_end = rng.uniform(100.0, 300.0);
  const double vibrato_rate = rng.uniform(3.0, 6.0);
  const double syllable_rate = rng.uniform(2.0, 5.0);
  const double syllable_phase = rng.uniform(0.0, kTwoPi);
  const int max_harmonics = 40;
  std::vector<double> amp(max_harmonics), phase(max_harmonics);
  for (int k = 0; k < max_harmonics; ++k) {
    amp[k] = rng.uniform(0.5, 1.0) / (k + 1);
    phase[k] = rng.uniform(0.0, kTwoPi);
  }
  const double duration = static_cast<double>(n) / fs;
  const double nyquist_guard = 0.45 * fs;
  std::vector<double> out(n, 0.0);
  double f0_phase = 0.0;  // integral of f0, in cycles
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 = (f0_start + (f0_end - f0_start) * t / duration) *
                      (1.0 + 0.02 * std::sin(kTwoPi * vibrato_rate * t));
    double s = 0.0;
    for (int k = 0; k < max_harmonics && (k + 1) * f0 < nyquist_guard; ++k)
      s += amp[k] * std::sin(kTwoPi * (k + 1) * f0_phase + phase[k]);
    const double env = 0.3 + 0.7 * (0.5 - 0.5 * std::cos(kTwoPi * syllable_rate * t + syllable_phase));
    out[i] = env * s;
    f0_phase += f0 / fs;
  }
  return out;
}

std::vector<double> chirp(std::size_t n, double fs, Rng& rng) {
  const double f_start = rng.uniform(100.0, 500.0);
  const double f_end = rng.uniform(1000.0, 4000.0);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double duration = static_cast<double>(n) / fs;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    out[i] = std::sin(kTwoPi * (f_start * t + 0.5 * (f_end - f_start) * t * t / duration) + phi);
  }
  return out;
}

std::vector<double> ar2(std::size_t n, double fs, Rng& rng) {
  const double f_res = rng.uniform(300.0, 3000.0);
  const double r = 0.97;
  const double a1 = 2.0 * r * std::cos(kTwoPi * f_res / fs);
  const double a2 = -r * r;
  std::vector<double> out(n);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = a1 * y1 + a2 * y2 + rng.normal();
    out[i] = y;
    y2 = y1;
    y1 = y;
  }
  return out;
}

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string to_string(Task t) { return t == Task::kDenoise ? "denoise" : "dereverb"; }

std::string to_string(CleanKind k) {
  switch (k) {
    case CleanKind::kHarmonic: return "harmonic";
    case CleanKind::kChirp: return "chirp";
    case CleanKind::kAR2: return "ar2";
  }
  return "unknown";
}

std::string to_string(NoiseKind k) { return k == NoiseKind::kWhite ? "white" : "pink"; }

Task task_from_string(const std::string& s) {
  if (s == "denoise") return Task::kDenoise;
  if (s == "dereverb") return Task::kDereverb;
  throw ConfigError("unknown task '" + s + "' (expected denoise or dereverb)");
}

CleanKind clean_kind_from_string(const std::string& s) {
  if (s == "harmonic") return CleanKind::kHarmonic;
  if (s == "chirp") return CleanKind::kChirp;
  if (s == "ar2") return CleanKind::kAR2;
  throw ConfigError("unknown clean kind '" + s + "' (expected harmonic, chirp or ar2)");
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "white") return NoiseKind::kWhite;
  if (s == "pink") return NoiseKind::kPink;
  throw ConfigError("unknown noise kind '" + s + "' (expected white or pink)");
}

std::size_t DatasetSpec::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

void DatasetSpec::validate() const {
  if (n_examples < 1) throw ConfigError("dataset: n_examples must be >= 1");
  if (!(duration_s >= 1.0)) throw ConfigError("dataset: duration_s must be >= 1");
  if (sample_rate <= 0) throw ConfigError("dataset: sample_rate must be positive");
  if (!(snr_range_db.lo <= snr_range_db.hi) || !std::isfinite(snr_range_db.lo) ||
      !std::isfinite(snr_range_db.hi))
    throw ConfigError("dataset: snr_range_db must be a finite nonempty interval");
  if (!(t60_range_s.lo <= t60_range_s.hi) || !(t60_range_s.lo > 0.0) || !std::isfinite(t60_range_s.hi))
    throw ConfigError("dataset: t60_range_s must be a nonempty interval of positive values");
}

void PairedExample::validate() const {
  clean.validate();
  degraded.validate();
  if (clean.size() != degraded.size()) throw DataError("paired example: length mismatch");
  if (clean.sample_rate != degraded.sample_rate) throw DataError("paired example: sample rate mismatch");
}

std::uint64_t example_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, index);
}

std::uint64_t stream_seed(std::uint64_t example_seed, Stream s) {
  return derive_seed(example_seed, static_cast<std::uint64_t>(s));
}

TimeSignal gen_clean(CleanKind kind, std::size_t num_samples, int sample_rate, std::uint64_t seed) {
  Rng rng(seed);
  const double fs = sample_rate;
  TimeSignal out;
  out.sample_rate = sample_rate;
  switch (kind) {
    case CleanKind::kHarmonic: out.samples = harmonic(num_samples, fs, rng); break;
    case CleanKind::kChirp: out.samples = chirp(num_samples, fs, rng); break;
    case CleanKind::kAR2: out.samples = ar2(num_samples, fs, rng); break;
  }
  peak_normalize(out.samples, kCleanPeak);
  return out;
}

TimeSignal gen_clean(const DatasetSpec& spec, std::size_t index) {
  spec.validate();
  return gen_clean(spec.clean_kind, spec.num_samples(), spec.sample_rate,
                   stream_seed(example_seed(spec.master_seed, index), Stream::kClean));
}

TimeSignal gen_noise(NoiseKind kind, std::size_t num_samples, int sample_rate, std::uint64_t seed) {
  Rng rng(seed);
  TimeSignal out;
  out.sample_rate = sample_rate;
  out.samples.resize(num_samples);
  if (kind == NoiseKind::kWhite) {
    for (double& v : out.samples) v = rng.normal();
    return out;
  }
  // Paul Kellet's pinking filter, then rescaled to unit empirical variance.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double& v : out.samples) {
    const double w = rng.normal();
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  double mean = 0.0;
  for (double v : out.samples) mean += v;
  if (num_samples > 0) mean /= static_cast<double>(num_samples);
  for (double& v : out.samples) v -= mean;
  const double e = energy(out.samples);
  if (e > 0.0) {
    const double g = std::sqrt(static_cast<double>(num_samples) / e);
    for (double& v : out.samples) v *= g;
  }
  return out;
}

PairedExample mix_noise(const TimeSignal& clean, const TimeSignal& noise, double snr_db) {
  if (clean.size() != noise.size()) throw DataError("mix_noise: clean and noise lengths differ");
  if (clean.sample_rate != noise.sample_rate) throw DataError("mix_noise: sample rates differ");
  if (!std::isfinite(snr_db)) throw DataError("mix_noise: snr_db must be finite");
  const double ec = energy(clean.samples);
  const double en = energy(noise.samples);
  if (!(ec > 0.0)) throw DataError("mix_noise: zero-energy clean signal");
  if (!(en > 0.0)) throw DataError("mix_noise: zero-energy noise");
  const double g = std::sqrt(ec / (en * std::pow(10.0, snr_db / 10.0)));
  PairedExample out;
  out.clean = clean;
  out.degraded.sample_rate = clean.sample_rate;
  out.degraded.samples.resize(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    out.degraded.samples[i] = clean.samples[i] + g * noise.samples[i];
  out.meta.task = Task::kDenoise;
  out.meta.snr_db = snr_db;
  return out;
}

TimeSignal gen_rir(double t60_s, double length_s, std::uint64_t seed, int sample_rate) {
  if (!(t60_s > 0.0) || !std::isfinite(t60_s)) throw DataError("gen_rir: t60 must be positive");
  if (!(length_s > 0.0)) throw DataError("gen_rir: length must be positive");
  if (sample_rate <= 0) throw DataError("gen_rir: sample rate must be positive");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length_s * sample_rate)));
  const double fs = sample_rate;
  const double decay = 3.0 * std::numbers::ln10 / t60_s;  // amplitude decay rate, 1/s
  // Tail energy ~ g^2 fs / (2 decay) = (t60 / 0.7)^3.
  const double tail_energy = std::pow(t60_s / 0.7, 3.0);
  const double g = std::sqrt(tail_energy * 2.0 * decay / fs);
  Rng rng(seed);
  TimeSignal rir;
  rir.sample_rate = sample_rate;
  rir.samples.resize(n);
  rir.samples[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i)
    rir.samples[i] = g * rng.normal() * std::exp(-decay * static_cast<double>(i) / fs);
  return rir;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  const std::size_t nc = n / 2 + 1;
  std::vector<double> ra(n, 0.0), rb(n, 0.0);
  std::copy(a.begin(), a.end(), ra.begin());
  std::copy(b.begin(), b.end(), rb.begin());
  std::vector<std::complex<double>> ca(nc), cb(nc);
  auto* fa = reinterpret_cast<fftw_complex*>(ca.data());
  auto* fb = reinterpret_cast<fftw_complex*>(cb.data());
  fftw_plan fwd, inv;
  {
    std::lock_guard lock(plan_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.data(), fa, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa, ra.data(), FFTW_ESTIMATE);
  }
  fftw_execute_dft_r2c(fwd, ra.data(), fa);
  fftw_execute_dft_r2c(fwd, rb.data(), fb);
  for (std::size_t k = 0; k < nc; ++k) ca[k] *= cb[k] / static_cast<double>(n);
  fftw_execute_dft_c2r(inv, fa, ra.data());
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  ra.resize(out_len);
  return ra;
}

PairedExample apply_reverb(const TimeSignal& clean, const TimeSignal& rir) {
  clean.validate();
  rir.validate();
  if (clean.sample_rate != rir.sample_rate) throw DataError("apply_reverb: sample rates differ");
  PairedExample out;
  out.clean = clean;
  out.degraded.sample_rate = clean.sample_rate;
  out.degraded.samples = convolve(clean.samples, rir.samples);
  out.degraded.samples.resize(clean.size());
  out.meta.task = Task::kDereverb;
  return out;
}

double estimate_t60(const TimeSignal& rir) {
  if (rir.size() < 3) throw DataError("estimate_t60: RIR too short");
  const std::size_t n = rir.size() - 1;
  std::vector<double> edc(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += rir.samples[i + 1] * rir.samples[i + 1];
    edc[i] = acc;
  }
  if (!(acc > 0.0)) throw DataError("estimate_t60: RIR has no tail energy");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  bool reached = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (db < -35.0) {
      reached = true;
      break;
    }
    if (db > -5.0) continue;
    const double t = static_cast<double>(i) / rir.sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (!reached || count < 2) throw DataError("estimate_t60: RIR does not decay to -35 dB");
  const double c = static_cast<double>(count);
  const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  if (!(slope < 0.0)) throw DataError("estimate_t60: energy does not decay");
  return -60.0 / slope;
}

std::optional<std::string> t60_range_warning(const DatasetSpec& spec, double t60_s) {
  if (spec.t60_range_s.contains(t60_s)) return std::nullopt;
  return "T60 " + std::to_string(t60_s) + " s outside configured range [" +
         std::to_string(spec.t60_range_s.lo) + ", " + std::to_string(spec.t60_range_s.hi) + "]";
}

}  // namespace sbse
