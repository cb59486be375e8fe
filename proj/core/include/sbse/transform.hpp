// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sbse {

using cplx = std::complex<double>;

enum class WindowKind { kHannPeriodic };

/// Parameters of the compressed-magnitude STFT and its inverse.
///
/// The forward transform is b * |STFT(x)|^a * exp(j * angle(STFT(x))), applied
/// bin by bin. Frames are centered: the signal is zero-padded by win_size/2 on
/// the left and framed every hop_size samples, giving ceil(N / hop_size)
/// frames for an N-sample input. Synthesis is a window-weighted overlap-add
/// normalized by the per-sample window energy, which makes it an exact left
/// inverse of analysis for any window/hop pair whose frames cover every
/// sample.
struct TransformConfig {
  int win_size = 510;
  int hop_size = 128;
  double compression_a = 0.5;
  double scale_b = 0.33;
  WindowKind window = WindowKind::kHannPeriodic;
  int sample_rate = 16000;

  int num_bins() const { return win_size / 2 + 1; }
  int num_frames(std::size_t num_samples) const;
  /// Throws ConfigError when any invariant is violated.
  void validate() const;

  bool operator==(const TransformConfig&) const = default;
};

struct TimeSignal {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  /// Nonempty and finite; throws DataError otherwise.
  void validate() const;
};

/// Complex coefficient grid, stored frame-major (all bins of frame 0, then
/// frame 1, ...). Toy shapes that do not come from analyze() are allowed;
/// synthesize() checks the bin count against its configuration.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram() = default;
  ComplexSpectrogram(int bins, int frames, TransformConfig cfg = {},
                     std::size_t original_length = 0);
  ComplexSpectrogram(int bins, int frames, std::vector<cplx> values,
                     TransformConfig cfg = {}, std::size_t original_length = 0);

  int bins() const { return bins_; }
  int frames() const { return frames_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  cplx& at(int bin, int frame) { return data_[index(bin, frame)]; }
  const cplx& at(int bin, int frame) const { return data_[index(bin, frame)]; }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  std::span<cplx> frame(int m) { return {data_.data() + index(0, m), static_cast<std::size_t>(bins_)}; }
  std::span<const cplx> frame(int m) const {
    return {data_.data() + index(0, m), static_cast<std::size_t>(bins_)};
  }

  std::vector<cplx>& values() { return data_; }
  const std::vector<cplx>& values() const { return data_; }

  const TransformConfig& transform() const { return cfg_; }
  std::size_t original_length() const { return original_length_; }

  bool same_shape(const ComplexSpectrogram& other) const {
    return bins_ == other.bins_ && frames_ == other.frames_;
  }
  /// Throws std::invalid_argument naming `what` when shapes differ.
  void require_same_shape(const ComplexSpectrogram& other, const std::string& what) const;

  bool all_finite() const;
  /// Root mean square of |c| over all components.
  double rms() const;

  /// Frames [first, first + count). The crop inverts to the corresponding
  /// count * hop_size segment of the original signal.
  ComplexSpectrogram crop_frames(int first, int count) const;

  /// Same shape and provenance, all zeros.
  ComplexSpectrogram zeros_like() const;

 private:
  std::size_t index(int bin, int frame) const {
    return static_cast<std::size_t>(frame) * static_cast<std::size_t>(bins_) +
           static_cast<std::size_t>(bin);
  }

  int bins_ = 0;
  int frames_ = 0;
  std::vector<cplx> data_;
  TransformConfig cfg_;
  std::size_t original_length_ = 0;
};

/// Periodic Hann window of the configured length.
std::vector<double> make_window(const TransformConfig& cfg);

/// b * m^a, with 0^a := 0.
double compress_magnitude(double m, const TransformConfig& cfg);
/// (m / b)^(1/a); inverse of compress_magnitude on m >= 0.
double decompress_magnitude(double m, const TransformConfig& cfg);

/// Plain (uncompressed) centered STFT.
ComplexSpectrogram stft(const TimeSignal& signal, const TransformConfig& cfg);
/// Overlap-add inverse of stft(); trims to `length` samples (0: frames * hop).
TimeSignal istft(const ComplexSpectrogram& spec, const TransformConfig& cfg, std::size_t length);

ComplexSpectrogram analyze(const TimeSignal& signal, const TransformConfig& cfg);
TimeSignal synthesize(const ComplexSpectrogram& spec, const TransformConfig& cfg);

/// Vector-Jacobian product of synthesize(): given dL/dx for every output
/// sample, returns dL/dRe(c) + j dL/dIm(c) for every input coefficient c.
ComplexSpectrogram synthesize_vjp(const ComplexSpectrogram& spec,
                                  std::span<const double> grad_time,
                                  const TransformConfig& cfg);

}  // namespace sbse
