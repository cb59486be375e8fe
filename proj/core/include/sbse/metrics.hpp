// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbse/transform.hpp"

namespace sbse {

/// Upper bound reported by si_sdr() and snr() when the residual vanishes.
inline constexpr double kMetricCapDb = 100.0;

/// Scale-invariant SDR in dB: with a = <est, ref> / ||ref||^2,
/// 10 log10(||a ref||^2 / ||a ref - est||^2), capped at kMetricCapDb.
double si_sdr(std::span<const double> reference, std::span<const double> estimate);
double si_sdr(const TimeSignal& reference, const TimeSignal& estimate);

/// 10 log10(||ref||^2 / ||ref - est||^2), capped at kMetricCapDb.
double snr(std::span<const double> reference, std::span<const double> estimate);
double snr(const TimeSignal& reference, const TimeSignal& estimate);

/// Mean squared difference of log10 magnitudes, each floored at 1e-8.
double spectral_log_mse(const ComplexSpectrogram& reference, const ComplexSpectrogram& estimate);

struct MetricRow {
  std::string id;
  double si_sdr_in = 0.0;
  double si_sdr_out = 0.0;
  double snr_in = 0.0;
  double snr_out = 0.0;
  double spectral_log_mse = 0.0;
  /// Values computed by external tools (PESQ, ESTOI, WER, ...), by name.
  std::map<std::string, double> external;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};
Summary summarize(std::span<const double> values);

/// Per-example metrics plus mean and standard deviation per column.
class MetricReport {
 public:
  void add(MetricRow row) { rows_.push_back(std::move(row)); }
  const std::vector<MetricRow>& rows() const { return rows_; }

  /// Column names: si_sdr_in, si_sdr_out, snr_in, snr_out,
  /// spectral_log_mse, si_sdr_improvement.
  Summary summary(const std::string& column) const;
  std::vector<double> column(const std::string& name) const;

  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::vector<MetricRow> rows_;
};

}  // namespace sbse
