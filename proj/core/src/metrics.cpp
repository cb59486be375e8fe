// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sbse {

namespace {

void require_pair(std::span<const double> ref, std::span<const double> est, const char* what) {
  if (ref.size() != est.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
  if (ref.empty()) throw std::invalid_argument(std::string(what) + ": empty signals");
}

double ratio_db(double num, double den) {
  if (!(den > 0.0)) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(num / den));
}

}  // namespace

double si_sdr(std::span<const double> reference, std::span<const double> estimate) {
  require_pair(reference, estimate, "si_sdr");
  double ref_energy = 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    dot += reference[i] * estimate[i];
  }
  if (!(ref_energy > 0.0)) throw std::invalid_argument("si_sdr: zero reference signal");
  const double a = dot / ref_energy;
  double target = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = a * reference[i];
    target += s * s;
    residual += (s - estimate[i]) * (s - estimate[i]);
  }
  // Residuals at rounding level count as exact reconstructions.
  if (residual <= 1e-20 * target) return kMetricCapDb;
  if (!(target > 0.0)) return -kMetricCapDb;
  return ratio_db(target, residual);
}

double si_sdr(const TimeSignal& reference, const TimeSignal& estimate) {
  return si_sdr(reference.samples, estimate.samples);
}

double snr(std::span<const double> reference, std::span<const double> estimate) {
  require_pair(reference, estimate, "snr");
  double ref_energy = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    residual += (reference[i] - estimate[i]) * (reference[i] - estimate[i]);
  }
  if (!(ref_energy > 0.0)) throw std::invalid_argument("snr: zero reference signal");
  return ratio_db(ref_energy, residual);
}

double snr(const TimeSignal& reference, const TimeSignal& estimate) {
  return snr(reference.samples, estimate.samples);
}

double spectral_log_mse(const ComplexSpectrogram& reference, const ComplexSpectrogram& estimate) {
  reference.require_same_shape(estimate, "spectral_log_mse");
  if (reference.empty()) throw std::invalid_argument("spectral_log_mse: empty spectrogram");
  constexpr double kFloor = 1e-8;
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = std::log10(std::max(std::abs(reference[i]), kFloor)) -
                     std::log10(std::max(std::abs(estimate[i]), kFloor));
    acc += d * d;
  }
  return acc / static_cast<double>(reference.size());
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

std::vector<double> MetricReport::column(const std::string& name) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const MetricRow& r : rows_) {
    if (name == "si_sdr_in") out.push_back(r.si_sdr_in);
    else if (name == "si_sdr_out") out.push_back(r.si_sdr_out);
    else if (name == "snr_in") out.push_back(r.snr_in);
    else if (name == "snr_out") out.push_back(r.snr_out);
    else if (name == "spectral_log_mse") out.push_back(r.spectral_log_mse);
    else if (name == "si_sdr_improvement") out.push_back(r.si_sdr_out - r.si_sdr_in);
    else {
      auto it = r.external.find(name);
      if (it == r.external.end()) throw std::invalid_argument("metric report: unknown column " + name);
      out.push_back(it->second);
    }
  }
  return out;
}

Summary MetricReport::summary(const std::string& column_name) const {
  const std::vector<double> v = column(column_name);
  return summarize(v);
}

std::string MetricReport::to_csv() const {
  std::set<std::string> external;
  for (const MetricRow& r : rows_)
    for (const auto& [k, v] : r.external) external.insert(k);
  std::ostringstream os;
  os.precision(10);
  os << "id,si_sdr_in,si_sdr_out,snr_in,snr_out,spectral_log_mse";
  for (const std::string& k : external) os << ',' << k;
  os << '\n';
  for (const MetricRow& r : rows_) {
    os << r.id << ',' << r.si_sdr_in << ',' << r.si_sdr_out << ',' << r.snr_in << ',' << r.snr_out
       << ',' << r.spectral_log_mse;
    for (const std::string& k : external) {
      os << ',';
      auto it = r.external.find(k);
      if (it != r.external.end()) os << it->second;
    }
    os << '\n';
  }
  return os.str();
}

std::string MetricReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const MetricRow& r : rows_) {
    nlohmann::json j = {{"id", r.id},
                        {"si_sdr_in", r.si_sdr_in},
                        {"si_sdr_out", r.si_sdr_out},
                        {"snr_in", r.snr_in},
                        {"snr_out", r.snr_out},
                        {"spectral_log_mse", r.spectral_log_mse}};
    for (const auto& [k, v] : r.external) j[k] = v;
    rows.push_back(j);
  }
  nlohmann::json agg = nlohmann::json::object();
  if (!rows_.empty()) {
    for (const char* name : {"si_sdr_in", "si_sdr_out", "snr_in", "snr_out", "spectral_log_mse",
                             "si_sdr_improvement"}) {
      const Summary s = summary(name);
      agg[name] = {{"mean", s.mean}, {"std", s.stddev}};
    }
  }
  return nlohmann::json{{"examples", rows}, {"summary", agg}, {"count", rows_.size()}}.dump(2);
}

}  // namespace sbse
