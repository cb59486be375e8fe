// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sbse/error.hpp"

namespace sbse {

OuveParams OuveParams::from_sigma_range(double gamma, double sigma_min, double sigma_max) {
  if (!(sigma_min > 0.0 && sigma_max > sigma_min))
    throw ConfigError("ouve: need 0 < sigma_min < sigma_max");
  const double k = sigma_max / sigma_min;
  return {gamma, 2.0 * sigma_min * sigma_min * std::log(k), k};
}

Schedule::Schedule(ScheduleKind kind, std::variant<SbveParams, SbvpParams, OuveParams> params,
                   double T, double t_min)
    : kind_(kind), params_(params), T_(T), t_min_(t_min) {
  if (!(T > 0.0)) throw ConfigError("schedule: T must be positive");
  if (!(t_min > 0.0 && t_min < T)) throw ConfigError("schedule: need 0 < t_min < T");
}

Schedule Schedule::sb_ve(SbveParams p, double T, double t_min) {
  if (!(p.c > 0.0)) throw ConfigError("sbve: c must be positive");
  if (!(p.k > 1.0)) throw ConfigError("sbve: k must exceed 1");
  return Schedule(ScheduleKind::kSBVE, p, T, t_min);
}

Schedule Schedule::sb_vp(SbvpParams p, double T, double t_min) {
  if (!(p.beta0 > 0.0)) throw ConfigError("sbvp: beta0 must be positive");
  if (!(p.beta1 > p.beta0)) throw ConfigError("sbvp: beta1 must exceed beta0");
  if (!(p.c > 0.0)) throw ConfigError("sbvp: c must be positive");
  return Schedule(ScheduleKind::kSBVP, p, T, t_min);
}

Schedule Schedule::ouve(OuveParams p, double T, double t_min) {
  if (!(p.gamma > 0.0)) throw ConfigError("ouve: gamma must be positive");
  if (!(p.c > 0.0)) throw ConfigError("ouve: c must be positive");
  if (!(p.k > 1.0)) throw ConfigError("ouve: k must exceed 1");
  return Schedule(ScheduleKind::kOUVE, p, T, t_min);
}

Schedule Schedule::from_name(const std::string& name) {
  if (name == "sbve") return sb_ve();
  if (name == "sbvp") return sb_vp();
  if (name == "ouve") return ouve();
  throw ConfigError("unknown schedule '" + name + "' (expected sbve, sbvp or ouve)");
}

std::string Schedule::name() const {
  switch (kind_) {
    case ScheduleKind::kSBVE: return "sbve";
    case ScheduleKind::kSBVP: return "sbvp";
    case ScheduleKind::kOUVE: return "ouve";
  }
  return "unknown";
}

void Schedule::check_time(double t) const {
  if (!(t >= 0.0 && t <= T_))
    throw std::out_of_range("schedule: t = " + std::to_string(t) + " outside [0, T]");
}

double Schedule::vp_exponent(double t) const {
  const SbvpParams& p = sbvp_params();
  return p.beta0 * t + 0.5 * (p.beta1 - p.beta0) * t * t;
}

double Schedule::alpha(double t) const {
  check_time(t);
  switch (kind_) {
    case ScheduleKind::kSBVE: return 1.0;
    case ScheduleKind::kSBVP: return std::exp(-0.5 * vp_exponent(t));
    case ScheduleKind::kOUVE: return std::exp(-ouve_params().gamma * t);
  }
  return 1.0;
}

double Schedule::sigma2(double t) const {
  check_time(t);
  switch (kind_) {
    case ScheduleKind::kSBVE: {
      const SbveParams& p = sbve_params();
      const double lk = std::log(p.k);
      return p.c * std::expm1(2.0 * t * lk) / (2.0 * lk);
    }
    case ScheduleKind::kSBVP:
      return sbvp_params().c * std::expm1(vp_exponent(t));
    case ScheduleKind::kOUVE: {
      const OuveParams& p = ouve_params();
      const double lk = std::log(p.k);
      // k^(2t) - e^(-2 gamma t) = e^(-2 gamma t) (e^(2t (gamma + log k)) - 1)
      return p.c * std::exp(-2.0 * p.gamma * t) * std::expm1(2.0 * t * (p.gamma + lk)) /
             (2.0 * (p.gamma + lk));
    }
  }
  return 0.0;
}

double Schedule::sigma_bar2(double t) const {
  check_time(t);
  switch (kind_) {
    case ScheduleKind::kSBVE: {
      const SbveParams& p = sbve_params();
      const double lk = std::log(p.k);
      // c (k^(2T) - k^(2t)) / (2 log k)
      return p.c * std::exp(2.0 * t * lk) * std::expm1(2.0 * (T_ - t) * lk) / (2.0 * lk);
    }
    case ScheduleKind::kSBVP: {
      const double bt = vp_exponent(t);
      return sbvp_params().c * std::exp(bt) * std::expm1(vp_exponent(T_) - bt);
    }
    case ScheduleKind::kOUVE:
      return sigma2(T_) - sigma2(t);
  }
  return 0.0;
}

double Schedule::sigma_T2() const { return sigma2(T_); }

MeanWeights Schedule::weights(double t) const {
  check_time(t);
  if (kind_ == ScheduleKind::kOUVE) {
    const double e = std::exp(-ouve_params().gamma * t);
    return {e, -std::expm1(-ouve_params().gamma * t)};
  }
  const double sT2 = sigma_T2();
  const double a = alpha(t);
  return {a * sigma_bar2(t) / sT2, (a / alpha_T()) * sigma2(t) / sT2};
}

double Schedule::marginal_variance(double t) const {
  check_time(t);
  if (kind_ == ScheduleKind::kOUVE) return sigma2(t);
  const double a = alpha(t);
  return a * a * sigma_bar2(t) * (sigma2(t) / sigma_T2());
}

DriftDiffusion Schedule::drift_diffusion(double t) const {
  check_time(t);
  switch (kind_) {
    case ScheduleKind::kSBVE: {
      const SbveParams& p = sbve_params();
      return {0.0, p.c * std::pow(p.k, 2.0 * t)};
    }
    case ScheduleKind::kSBVP: {
      const SbvpParams& p = sbvp_params();
      const double beta = p.beta0 + (p.beta1 - p.beta0) * t;
      return {-0.5 * beta, p.c * beta};
    }
    case ScheduleKind::kOUVE: {
      const OuveParams& p = ouve_params();
      return {-p.gamma, p.c * std::pow(p.k, 2.0 * t)};
    }
  }
  return {0.0, 0.0};
}

double max_marginal_variance(const Schedule& s) {
  double best = 0.0;
  for (int i = 0; i <= 1000; ++i) best = std::max(best, s.marginal_variance(s.T() * i / 1000.0));
  return best;
}

void check_ouve_figure_preset(const Schedule& s) {
  if (s.kind() != ScheduleKind::kOUVE) throw ConfigError("figure preset applies to ouve only");
  const double v = max_marginal_variance(s);
  if (std::abs(v - 0.15) > 0.05 * 0.15)
    throw ConfigError("ouve figure preset: maximum variance " + std::to_string(v) +
                      " is not within 5% of 0.15");
}

}  // namespace sbse
