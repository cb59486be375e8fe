// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>

#include "sbse/metrics.hpp"
#include "test_util.hpp"

namespace sbse {
namespace {

using testing::random_signal;

TEST(Metrics, SiSdrExamples) {
  const std::vector<double> ref{1.0, 0.0, 0.0, 0.0};
  // est = ref + orthogonal e: target energy 1, residual 0.01 -> 20 dB.
  const std::vector<double> est{1.0, 0.1, 0.0, 0.0};
  EXPECT_NEAR(si_sdr(ref, est), 20.0, 1e-12);
  EXPECT_EQ(si_sdr(ref, ref), kMetricCapDb);
  // A scaled estimate is still perfect.
  EXPECT_EQ(si_sdr(ref, std::vector<double>{3.0, 0.0, 0.0, 0.0}), kMetricCapDb);
  // Projection: est = 0.5 ref + e with |e|^2 = 0.25 -> 0 dB.
  EXPECT_NEAR(si_sdr(ref, std::vector<double>{0.5, 0.5, 0.0, 0.0}), 0.0, 1e-12);
}

TEST(Metrics, SnrExamples) {
  const std::vector<double> ref{1.0, -1.0, 1.0, -1.0};
  const std::vector<double> est{1.1, -1.1, 0.9, -0.9};
  EXPECT_NEAR(snr(ref, est), 10.0 * std::log10(4.0 / 0.04), 1e-12);
  EXPECT_EQ(snr(ref, ref), kMetricCapDb);
}

TEST(Metrics, SiSdrIsScaleInvariant) {
  const TimeSignal ref = random_signal(2000, 1), noise = random_signal(2000, 2);
  TimeSignal est = ref;
  for (std::size_t i = 0; i < est.size(); ++i) est.samples[i] += 0.5 * noise.samples[i];
  const double base = si_sdr(ref, est);
  for (double a : {0.01, 0.7, 3.0, 250.0}) {
    TimeSignal scaled = est;
    for (double& v : scaled.samples) v *= a;
    EXPECT_NEAR(si_sdr(ref, scaled), base, 1e-10);
  }
}

TEST(Metrics, SiSdrDecreasesWithOrthogonalNoise) {
  std::vector<double> ref(512), noise(512);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref[i] = std::sin(0.05 * i);
    noise[i] = std::cos(0.05 * i) * (i % 3 == 0 ? 1.0 : -0.5);
  }
  // Remove the projection so the noise is exactly orthogonal.
  double dot = 0.0, e = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) dot += ref[i] * noise[i], e += ref[i] * ref[i];
  for (std::size_t i = 0; i < ref.size(); ++i) noise[i] -= dot / e * ref[i];
  double prev = kMetricCapDb + 1;
  for (double g : {0.01, 0.05, 0.2, 1.0, 4.0}) {
    std::vector<double> est(ref);
    for (std::size_t i = 0; i < est.size(); ++i) est[i] += g * noise[i];
    const double v = si_sdr(ref, est);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Metrics, Errors) {
  const std::vector<double> zero(4, 0.0), one(4, 1.0), three(3, 1.0);
  EXPECT_THROW(si_sdr(zero, one), std::invalid_argument);
  EXPECT_THROW(si_sdr(one, three), std::invalid_argument);
  EXPECT_THROW(snr(zero, one), std::invalid_argument);
  EXPECT_THROW(si_sdr(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Metrics, SpectralLogMse) {
  ComplexSpectrogram a(2, 1), b(2, 1);
  a[0] = {10.0, 0.0};
  b[0] = {0.0, 1.0};
  a[1] = {0.0, 0.0};
  b[1] = {1e-12, 0.0};
  // (log10 10 - log10 1)^2 = 1; both tiny values clamp to the floor.
  EXPECT_NEAR(spectral_log_mse(a, b), 0.5, 1e-15);
  EXPECT_EQ(spectral_log_mse(a, a), 0.0);
}

TEST(Metrics, ReportAggregates) {
  MetricReport r;
  const double in[] = {1.0, 2.0, 6.0};
  const double out[] = {4.0, 3.0, 11.0};
  for (int i = 0; i < 3; ++i) {
    MetricRow row;
    row.id = "ex" + std::to_string(i);
    row.si_sdr_in = in[i];
    row.si_sdr_out = out[i];
    row.external["pesq"] = 1.0 + i;
    r.add(row);
  }
  EXPECT_NEAR(r.summary("si_sdr_in").mean, 3.0, 1e-12);
  EXPECT_NEAR(r.summary("si_sdr_in").stddev, std::sqrt(14.0 / 3.0), 1e-12);
  EXPECT_NEAR(r.summary("si_sdr_improvement").mean, 3.0, 1e-12);
  EXPECT_NEAR(r.summary("pesq").mean, 2.0, 1e-12);
  EXPECT_THROW(r.summary("estoi"), std::invalid_argument);

  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,si_sdr_in,si_sdr_out,snr_in,snr_out,spectral_log_mse,pesq");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  const nlohmann::json j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["count"], 3);
  EXPECT_EQ(j["examples"].size(), 3u);
  EXPECT_NEAR(j["summary"]["si_sdr_out"]["mean"].get<double>(), 6.0, 1e-12);
}

TEST(Metrics, EmptySummary) {
  const Summary s = summarize({});
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(MetricReport().rows().size(), 0u);
}

}  // namespace
}  // namespace sbse
