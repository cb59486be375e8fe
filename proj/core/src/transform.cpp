// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "sbse/error.hpp"

namespace sbse {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and reused.
struct RealFftPlans {
  fftw_plan forward;
  fftw_plan backward;
};

const RealFftPlans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, RealFftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<cplx> spec(static_cast<std::size_t>(n / 2 + 1));
  auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  RealFftPlans p{fftw_plan_dft_r2c_1d(n, real.data(), cspec, flags),
                 fftw_plan_dft_c2r_1d(n, cspec, real.data(), flags)};
  return cache.emplace(n, p).first->second;
}

void rfft(int n, std::vector<double>& in, std::span<cplx> out) {
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

// Unnormalized: the result is n times the inverse DFT. Destroys `in`.
void irfft(int n, std::vector<cplx>& in, std::vector<double>& out) {
  fftw_execute_dft_c2r(plans_for(n).backward, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
}

void require_finite(const TimeSignal& s) { s.validate(); }

// Sum over frames of w^2 at every output sample.
std::vector<double> window_energy(const std::vector<double>& window, int frames, int hop,
                                  std::size_t length) {
  const int win = static_cast<int>(window.size());
  const long pad = win / 2;
  std::vector<double> wsum(length, 0.0);
  for (int m = 0; m < frames; ++m) {
    const long start = static_cast<long>(m) * hop - pad;
    for (int k = 0; k < win; ++k) {
      const long n = start + k;
      if (n < 0 || n >= static_cast<long>(length)) continue;
      wsum[static_cast<std::size_t>(n)] += window[k] * window[k];
    }
  }
  return wsum;
}

void require_compatible(const ComplexSpectrogram& spec, const TransformConfig& cfg) {
  cfg.validate();
  const TransformConfig& p = spec.transform();
  if (p.win_size != cfg.win_size || p.hop_size != cfg.hop_size ||
      p.compression_a != cfg.compression_a || p.scale_b != cfg.scale_b ||
      p.sample_rate != cfg.sample_rate) {
    throw ConfigError("synthesize: spectrogram was produced with a different transform config");
  }
  if (spec.bins() != cfg.num_bins()) {
    throw ConfigError("synthesize: expected " + std::to_string(cfg.num_bins()) +
                      " frequency bins, got " + std::to_string(spec.bins()));
  }
}

}  // namespace

int TransformConfig::num_frames(std::size_t num_samples) const {
  return static_cast<int>((num_samples + static_cast<std::size_t>(hop_size) - 1) /
                          static_cast<std::size_t>(hop_size));
}

void TransformConfig::validate() const {
  if (win_size < 2 || win_size % 2 != 0)
    throw ConfigError("transform: win_size must be even and >= 2");
  if (hop_size <= 0 || hop_size >= win_size)
    throw ConfigError("transform: hop_size must satisfy 0 < hop_size < win_size");
  if (!(compression_a > 0.0 && compression_a <= 1.0))
    throw ConfigError("transform: compression_a must lie in (0, 1]");
  if (!(scale_b > 0.0)) throw ConfigError("transform: scale_b must be positive");
  if (sample_rate <= 0) throw ConfigError("transform: sample_rate must be positive");
}

void TimeSignal::validate() const {
  if (samples.empty()) throw DataError("signal is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i]))
      throw DataError("signal has a non-finite sample at index " + std::to_string(i));
  }
}

ComplexSpectrogram::ComplexSpectrogram(int bins, int frames, TransformConfig cfg,
                                       std::size_t original_length)
    : ComplexSpectrogram(bins, frames,
                         std::vector<cplx>(static_cast<std::size_t>(std::max(bins, 0)) *
                                           static_cast<std::size_t>(std::max(frames, 0))),
                         cfg, original_length) {}

ComplexSpectrogram::ComplexSpectrogram(int bins, int frames, std::vector<cplx> values,
                                       TransformConfig cfg, std::size_t original_length)
    : bins_(bins),
      frames_(frames),
      data_(std::move(values)),
      cfg_(cfg),
      original_length_(original_length) {
  if (bins < 0 || frames < 0) throw std::invalid_argument("spectrogram: negative shape");
  if (data_.size() != static_cast<std::size_t>(bins) * static_cast<std::size_t>(frames))
    throw std::invalid_argument("spectrogram: value count does not match shape");
}

void ComplexSpectrogram::require_same_shape(const ComplexSpectrogram& other,
                                            const std::string& what) const {
  if (!same_shape(other)) {
    throw std::invalid_argument(what + ": shape mismatch (" + std::to_string(bins_) + "x" +
                                std::to_string(frames_) + " vs " + std::to_string(other.bins_) +
                                "x" + std::to_string(other.frames_) + ")");
  }
}

bool ComplexSpectrogram::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double ComplexSpectrogram::rms() const {
  if (data_.empty()) return 0.0;
  double acc = 0.0;
  for (const cplx& c : data_) acc += std::norm(c);
  return std::sqrt(acc / static_cast<double>(data_.size()));
}

ComplexSpectrogram ComplexSpectrogram::crop_frames(int first, int count) const {
  if (first < 0 || count <= 0 || first + count > frames_)
    throw std::out_of_range("crop_frames: range outside spectrogram");
  std::vector<cplx> v(data_.begin() + static_cast<long>(index(0, first)),
                      data_.begin() + static_cast<long>(index(0, first + count)));
  return ComplexSpectrogram(bins_, count, std::move(v), cfg_,
                            static_cast<std::size_t>(count) * static_cast<std::size_t>(cfg_.hop_size));
}

ComplexSpectrogram ComplexSpectrogram::zeros_like() const {
  return ComplexSpectrogram(bins_, frames_, cfg_, original_length_);
}

std::vector<double> make_window(const TransformConfig& cfg) {
  std::vector<double> w(static_cast<std::size_t>(cfg.win_size));
  const double n = static_cast<double>(cfg.win_size);
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / n);
  return w;
}

double compress_magnitude(double m, const TransformConfig& cfg) {
  if (m <= 0.0) return 0.0;
  return cfg.scale_b * std::pow(m, cfg.compression_a);
}

double decompress_magnitude(double m, const TransformConfig& cfg) {
  if (m <= 0.0) return 0.0;
  return std::pow(m / cfg.scale_b, 1.0 / cfg.compression_a);
}

ComplexSpectrogram stft(const TimeSignal& signal, const TransformConfig& cfg) {
  cfg.validate();
  require_finite(signal);
  if (signal.sample_rate != cfg.sample_rate)
    throw ConfigError("analyze: signal sample rate " + std::to_string(signal.sample_rate) +
                      " does not match transform sample rate " + std::to_string(cfg.sample_rate));
  const int win = cfg.win_size;
  const long pad = win / 2;
  const long n_samples = static_cast<long>(signal.size());
  const int frames = cfg.num_frames(signal.size());
  const std::vector<double> window = make_window(cfg);

  ComplexSpectrogram out(cfg.num_bins(), frames, cfg, signal.size());
  std::vector<double> buf(static_cast<std::size_t>(win));
  for (int m = 0; m < frames; ++m) {
    const long start = static_cast<long>(m) * cfg.hop_size - pad;
    for (int k = 0; k < win; ++k) {
      const long n = start + k;
      buf[k] = (n >= 0 && n < n_samples) ? window[k] * signal.samples[static_cast<std::size_t>(n)] : 0.0;
    }
    rfft(win, buf, out.frame(m));
  }
  return out;
}

TimeSignal istft(const ComplexSpectrogram& spec, const TransformConfig& cfg, std::size_t length) {
  cfg.validate();
  if (spec.bins() != cfg.num_bins())
    throw ConfigError("istft: bin count does not match win_size");
  const int win = cfg.win_size;
  const long pad = win / 2;
  if (length == 0) length = static_cast<std::size_t>(spec.frames()) * cfg.hop_size;
  const std::vector<double> window = make_window(cfg);
  const std::vector<double> wsum = window_energy(window, spec.frames(), cfg.hop_size, length);

  std::vector<double> acc(length, 0.0);
  std::vector<cplx> bins(static_cast<std::size_t>(spec.bins()));
  std::vector<double> frame(static_cast<std::size_t>(win));
  const double inv_n = 1.0 / static_cast<double>(win);
  for (int m = 0; m < spec.frames(); ++m) {
    auto src = spec.frame(m);
    std::copy(src.begin(), src.end(), bins.begin());
    irfft(win, bins, frame);
    const long start = static_cast<long>(m) * cfg.hop_size - pad;
    for (int k = 0; k < win; ++k) {
      const long n = start + k;
      if (n < 0 || n >= static_cast<long>(length)) continue;
      acc[static_cast<std::size_t>(n)] += window[k] * frame[k] * inv_n;
    }
  }
  TimeSignal out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(length);
  for (std::size_t n = 0; n < length; ++n) {
    if (wsum[n] < 1e-10)
      throw ConfigError("synthesize: window overlap leaves sample " + std::to_string(n) +
                        " uncovered (window/hop pair is ill-posed)");
    out.samples[n] = acc[n] / wsum[n];
  }
  return out;
}

ComplexSpectrogram analyze(const TimeSignal& signal, const TransformConfig& cfg) {
  ComplexSpectrogram spec = stft(signal, cfg);
  for (cplx& c : spec.values()) {
    const double mag = std::abs(c);
    c = mag > 0.0 ? c * (compress_magnitude(mag, cfg) / mag) : cplx{};
  }
  return spec;
}

TimeSignal synthesize(const ComplexSpectrogram& spec, const TransformConfig& cfg) {
  require_compatible(spec, cfg);
  ComplexSpectrogram raw = spec;
  for (cplx& c : raw.values()) {
    const double mag = std::abs(c);
    c = mag > 0.0 ? c * (decompress_magnitude(mag, cfg) / mag) : cplx{};
  }
  return istft(raw, cfg, spec.original_length());
}

ComplexSpectrogram synthesize_vjp(const ComplexSpectrogram& spec, std::span<const double> grad_time,
                                  const TransformConfig& cfg) {
  require_compatible(spec, cfg);
  const int win = cfg.win_size;
  const long pad = win / 2;
  std::size_t length = spec.original_length();
  if (length == 0) length = static_cast<std::size_t>(spec.frames()) * cfg.hop_size;
  if (grad_time.size() != length)
    throw std::invalid_argument("synthesize_vjp: gradient length does not match signal length");

  const std::vector<double> window = make_window(cfg);
  const std::vector<double> wsum = window_energy(window, spec.frames(), cfg.hop_size, length);
  std::vector<double> g(length);
  for (std::size_t n = 0; n < length; ++n) g[n] = grad_time[n] / wsum[n];

  // Adjoint of the overlap-add and of the real inverse DFT: the inverse DFT
  // of a half spectrum weights interior bins twice and reads only the real
  // part of the DC and Nyquist bins.
  ComplexSpectrogram grad = spec.zeros_like();
  std::vector<double> buf(static_cast<std::size_t>(win));
  const int nyquist = win / 2;
  const double inv_n = 1.0 / static_cast<double>(win);
  for (int m = 0; m < spec.frames(); ++m) {
    const long start = static_cast<long>(m) * cfg.hop_size - pad;
    for (int k = 0; k < win; ++k) {
      const long n = start + k;
      buf[k] = (n >= 0 && n < static_cast<long>(length)) ? window[k] * g[static_cast<std::size_t>(n)] : 0.0;
    }
    auto gf = grad.frame(m);
    rfft(win, buf, gf);
    for (int f = 0; f <= nyquist; ++f) {
      const double weight = (f == 0 || f == nyquist) ? inv_n : 2.0 * inv_n;
      gf[f] *= weight;
    }
  }

  // Chain through the magnitude decompression d = c * h(|c|),
  // h(r) = r^(p-1) / b^p with p = 1/a.
  const double p = 1.0 / cfg.compression_a;
  const double bp = std::pow(cfg.scale_b, p);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const cplx c = spec[i];
    const cplx gd = grad[i];
    const double r = std::abs(c);
    if (r == 0.0) {
      grad[i] = (p == 1.0) ? gd / cfg.scale_b : cplx{};
      continue;
    }
    const double h = std::pow(r, p - 1.0) / bp;
    // h'(r)/r * c_u c_v, written through h to avoid large powers.
    const double k = (p - 1.0) * h / (r * r);
    const double cr = c.real();
    const double ci = c.imag();
    const double grr = h + k * cr * cr;
    const double gri = k * cr * ci;
    const double gii = h + k * ci * ci;
    grad[i] = {gd.real() * grr + gd.imag() * gri, gd.real() * gri + gd.imag() * gii};
  }
  return grad;
}

}  // namespace sbse
