// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <variant>

namespace sbse {

enum class ScheduleKind { kSBVE, kSBVP, kOUVE };

/// Bridge with zero drift and g^2(t) = c k^(2t).
struct SbveParams {
  double c = 0.40;
  double k = 2.6;
};

/// Bridge with scaled variance-preserving drift,
/// f(t) = -(beta0 + (beta1 - beta0) t) / 2 and g^2(t) = -2 c f(t).
struct SbvpParams {
  double beta0 = 0.01;
  double beta1 = 20.0;
  double c = 0.3;
};

/// Ornstein-Uhlenbeck drift gamma (y - x) with variance-exploding diffusion
/// g^2(t) = c k^(2t). Defaults follow the sigma_min = 0.05, sigma_max = 0.5
/// parametrization, c = 2 sigma_min^2 log(sigma_max / sigma_min) and
/// k = sigma_max / sigma_min, which puts the state variance at t = 1 near 0.15.
struct OuveParams {
  double gamma = 1.5;
  double c = 0.011512925464970229;  // 2 * 0.05^2 * ln(10)
  double k = 10.0;

  static OuveParams from_sigma_range(double gamma, double sigma_min, double sigma_max);
};

struct MeanWeights {
  double w_x;
  double w_y;
};

/// SDE coefficients at time t. For OUVE the drift is affine, gamma (y - x);
/// `f` then holds the coefficient on the state, -gamma.
struct DriftDiffusion {
  double f;
  double g2;
};

/// Noise schedule with closed-form marginal quantities. Immutable; every
/// query is a pure function of t. Queries outside [0, T] throw
/// std::out_of_range.
class Schedule {
 public:
  static Schedule sb_ve(SbveParams p = {}, double T = 1.0, double t_min = 1e-4);
  static Schedule sb_vp(SbvpParams p = {}, double T = 1.0, double t_min = 1e-4);
  static Schedule ouve(OuveParams p = {}, double T = 1.0, double t_min = 1e-4);
  /// "sbve", "sbvp" or "ouve" with default parameters.
  static Schedule from_name(const std::string& name);

  ScheduleKind kind() const { return kind_; }
  std::string name() const;
  bool is_bridge() const { return kind_ != ScheduleKind::kOUVE; }
  double T() const { return T_; }
  double t_min() const { return t_min_; }

  const SbveParams& sbve_params() const { return std::get<SbveParams>(params_); }
  const SbvpParams& sbvp_params() const { return std::get<SbvpParams>(params_); }
  const OuveParams& ouve_params() const { return std::get<OuveParams>(params_); }

  /// exp(integral_0^t f). For OUVE this is exp(-gamma t), the decay of the
  /// homogeneous part of the affine drift.
  double alpha(double t) const;
  /// Bridge kinds: sigma_t^2 = integral_0^t g^2 / alpha^2.
  /// OUVE: the state variance of the transition distribution.
  double sigma2(double t) const;
  /// sigma_T^2 - sigma_t^2 (bridge kinds), evaluated without cancellation.
  double sigma_bar2(double t) const;
  double sigma_T2() const;
  double alpha_T() const { return alpha(T_); }

  MeanWeights weights(double t) const;
  /// Variance of the Gaussian marginal of the state.
  double marginal_variance(double t) const;
  DriftDiffusion drift_diffusion(double t) const;

 private:
  Schedule(ScheduleKind kind, std::variant<SbveParams, SbvpParams, OuveParams> params, double T,
           double t_min);
  void check_time(double t) const;
  // SBVP: integral_0^t of (beta0 + (beta1 - beta0) tau).
  double vp_exponent(double t) const;

  ScheduleKind kind_;
  std::variant<SbveParams, SbvpParams, OuveParams> params_;
  double T_;
  double t_min_;
};

/// Maximum of marginal_variance() over a uniform 1001-point grid on [0, T].
double max_marginal_variance(const Schedule& s);

/// The OUVE figure preset targets a maximum variance of 0.15; throws
/// ConfigError when the given schedule misses it by more than 5%.
void check_ouve_figure_preset(const Schedule& s);

}  // namespace sbse
