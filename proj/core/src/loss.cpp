// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/loss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sbse/error.hpp"

namespace sbse {

namespace {

void require_equal_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
  if (a.empty()) throw std::invalid_argument(std::string(what) + ": empty signals");
}

double energy(std::span<const double> v) {
  double e = 0.0;
  for (double s : v) e += s * s;
  return e;
}

void check_loss_config(const TrainConfig& cfg) {
  if (!(cfg.lambda_aux >= 0.0)) throw ConfigError("loss: lambda_aux must be >= 0");
}

}  // namespace

std::string to_string(AuxLossKind kind) {
  switch (kind) {
    case AuxLossKind::kNone: return "none";
    case AuxLossKind::kL1: return "l1";
    case AuxLossKind::kSoftSISDR: return "soft-sisdr";
  }
  return "unknown";
}

AuxLossKind aux_loss_kind_from_string(const std::string& name) {
  if (name == "none") return AuxLossKind::kNone;
  if (name == "l1") return AuxLossKind::kL1;
  if (name == "soft-sisdr" || name == "sisdr") return AuxLossKind::kSoftSISDR;
  throw ConfigError("unknown auxiliary loss '" + name + "' (expected none, l1 or soft-sisdr)");
}

void TrainConfig::validate() const {
  check_loss_config(*this);
  if (!(lr >= 0.0)) throw ConfigError("train: lr must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw ConfigError("train: ema_decay must lie in (0, 1)");
  if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
  if (max_steps < 0) throw ConfigError("train: max_steps must be >= 0");
  if (segment_frames < 1) throw ConfigError("train: segment_frames must be >= 1");
  if (!(snr_max_db > 0.0)) throw ConfigError("train: snr_max_db must be positive");
}

double spectral_mse(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x) {
  x_hat.require_same_shape(x, "data prediction loss");
  if (x.empty()) throw std::invalid_argument("data prediction loss: empty spectrogram");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x_hat[i] - x[i]);
  return acc / static_cast<double>(x.size());
}

double l1_aux(std::span<const double> x_hat, std::span<const double> x) {
  require_equal_length(x_hat, x, "l1 loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x_hat[i] - x[i]);
  return acc / static_cast<double>(x.size());
}

double soft_sisdr_aux(std::span<const double> x_hat, std::span<const double> x, double snr_max_db) {
  require_equal_length(x_hat, x, "soft SI-SDR loss");
  const double ref = energy(x);
  if (!(ref > 0.0)) throw std::invalid_argument("soft SI-SDR loss: zero reference signal");
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res += (x[i] - x_hat[i]) * (x[i] - x_hat[i]);
  const double tau = std::pow(10.0, -snr_max_db / 10.0);
  return -10.0 * std::log10(ref / (res + tau * ref));
}

LossTerms data_prediction_loss(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x,
                               const TimeSignal& x_hat_time, const TimeSignal& x_time,
                               const TrainConfig& cfg) {
  check_loss_config(cfg);
  LossTerms terms;
  terms.data = spectral_mse(x_hat, x);
  switch (cfg.aux_kind) {
    case AuxLossKind::kNone: break;
    case AuxLossKind::kL1: terms.aux = l1_aux(x_hat_time.samples, x_time.samples); break;
    case AuxLossKind::kSoftSISDR:
      terms.aux = soft_sisdr_aux(x_hat_time.samples, x_time.samples, cfg.snr_max_db);
      break;
  }
  terms.total = terms.data + cfg.lambda_aux * terms.aux;
  return terms;
}

LossTerms data_prediction_loss_grad(const ComplexSpectrogram& x_hat, const ComplexSpectrogram& x,
                                    const TimeSignal& x_hat_time, const TimeSignal& x_time,
                                    const TrainConfig& cfg, LossGradient& grad) {
  const LossTerms terms = data_prediction_loss(x_hat, x, x_hat_time, x_time, cfg);
  grad.spectral = x.zeros_like();
  const double scale = 2.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) grad.spectral[i] = scale * (x_hat[i] - x[i]);

  const std::size_t n = x_hat_time.size();
  grad.time.assign(n, 0.0);
  if (cfg.aux_kind == AuxLossKind::kNone || cfg.lambda_aux == 0.0) return terms;
  const auto& e = x_hat_time.samples;
  const auto& r = x_time.samples;
  if (cfg.aux_kind == AuxLossKind::kL1) {
    const double w = cfg.lambda_aux / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = e[i] - r[i];
      grad.time[i] = d > 0.0 ? w : (d < 0.0 ? -w : 0.0);
    }
  } else {
    const double ref = energy(r);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (r[i] - e[i]) * (r[i] - e[i]);
    const double tau = std::pow(10.0, -cfg.snr_max_db / 10.0);
    const double w = cfg.lambda_aux * 10.0 / std::numbers::ln10 * 2.0 / (res + tau * ref);
    for (std::size_t i = 0; i < n; ++i) grad.time[i] = w * (e[i] - r[i]);
  }
  return terms;
}

double score_matching_loss(const ComplexSpectrogram& s_theta, double sigma_x_t,
                           const ComplexSpectrogram& z) {
  s_theta.require_same_shape(z, "score matching loss");
  if (!(sigma_x_t > 0.0))
    throw std::invalid_argument("score matching loss: sigma_x(t) must be positive (t below t_min?)");
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += std::norm(sigma_x_t * s_theta[i] + z[i]);
  return acc;
}

}  // namespace sbse
