// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbse/transform.hpp"

namespace sbse {

enum class AuxLossKind { kNone, kL1, kSoftSISDR };

std::string to_string(AuxLossKind kind);
AuxLossKind aux_loss_kind_from_string(const std::string& name);

enum class ValidationMetric { kLoss, kSISDR };

struct TrainConfig {
  double lambda_aux = 1e-3;
  AuxLossKind aux_kind = AuxLossKind::kL1;
  /// Threshold of the soft-thresholded SI-SDR auxiliary loss.
  double snr_max_db = 30.0;
  double lr = 1e-4;
  int batch_size = 4;
  double ema_decay = 0.999;
  int max_epochs = 100;
  /// Epochs without validation improvement before stopping.
  int patience = 20;
  /// Upper bound on optimizer steps; 0 disables the bound.
  long max_steps = 0;
  /// Training crop length in STFT frames.
  int segment_frames = 64;
  ValidationMetric validation = ValidationMetric::kLoss;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct LossTerms {
  double total = 0.0;
  double data = 0.0;
  double aux = 0.0;
};

/// Gradients of the data-prediction objective with respect to the spectral
/// estimate (dL/dRe + j dL/dIm) and the time-domain estimate.
struct LossGradient {
  ComplexSpectrogram spectral;
  std::vector<double> time;
};

/// (1/D) ||x_hat - x||^2 over the D complex components.
double spectral_mse(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x);
/// (1/N) ||x_hat - x||_1.
double l1_aux(std::span<const double> x_hat, std::span<const double> x);
/// -10 log10(||x||^2 / (||x - x_hat||^2 + tau ||x||^2)), tau = 10^(-snr_max/10).
double soft_sisdr_aux(std::span<const double> x_hat, std::span<const double> x,
                      double snr_max_db = 30.0);

/// Data-prediction objective with optional time-domain auxiliary term:
/// spectral_mse + lambda * aux. Throws on shape mismatch or lambda < 0.
LossTerms data_prediction_loss(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x,
                               const TimeSignal& x_hat_time, const TimeSignal& x_time,
                               const TrainConfig& cfg);

/// As data_prediction_loss, also filling `grad`.
LossTerms data_prediction_loss_grad(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x,
                                    const TimeSignal& x_hat_time, const TimeSignal& x_time,
                                    const TrainConfig& cfg, LossGradient& grad);

/// Denoising score-matching objective ||sigma_x(t) s_theta + z||^2. Zero at
/// the analytic conditional score s = -z / sigma_x(t).
double score_matching_loss(const ComplexSpectrogram& s_theta, double sigma_x_t,
                           const ComplexSpectrogram& z);

}  // namespace sbse
