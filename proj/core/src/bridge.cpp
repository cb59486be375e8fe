// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbse/error.hpp"

namespace sbse {

namespace {

void require_bridge(const Schedule& s, const char* what) {
  if (!s.is_bridge())
    throw ConfigError(std::string(what) + ": requires a bridge schedule (sbve or sbvp)");
}

void require_ouve(const Schedule& s, const char* what) {
  if (s.kind() != ScheduleKind::kOUVE)
    throw ConfigError(std::string(what) + ": requires the ouve schedule");
}

void require_order(double tau, double t, const Schedule& s, const char* what) {
  if (!(t >= 0.0 && t < tau && tau <= s.T()))
    throw std::invalid_argument(std::string(what) + ": need 0 <= t < tau <= T");
}

void check_state(const ComplexSpectrogram& state, double limit, int step) {
  if (!state.all_finite()) throw NumericalError("reverse process produced a non-finite state", step);
  if (state.rms() > limit) throw NumericalError("reverse process diverged", step);
}

}  // namespace

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kSBSDE: return "sde";
    case SamplerKind::kSBODE: return "ode";
    case SamplerKind::kOUVEEM: return "ouve";
  }
  return "unknown";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "sde" || name == "sb-sde") return SamplerKind::kSBSDE;
  if (name == "ode" || name == "sb-ode") return SamplerKind::kSBODE;
  if (name == "ouve" || name == "ouve-em") return SamplerKind::kOUVEEM;
  throw ConfigError("unknown sampler '" + name + "' (expected sde, ode or ouve)");
}

void SamplerConfig::validate(const Schedule& s) const {
  if (n_steps < 1) throw ConfigError("sampler: n_steps must be >= 1");
  if (!(t_min > 0.0 && t_min < s.T())) throw ConfigError("sampler: t_min must lie in (0, T)");
  if (kind == SamplerKind::kOUVEEM) {
    require_ouve(s, "ouve sampler");
  } else {
    require_bridge(s, "bridge sampler");
  }
}

std::vector<double> reverse_time_grid(double T, double t_min, int n_steps) {
  if (n_steps < 1) throw ConfigError("time grid: n_steps must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
  const double dt = (T - t_min) / n_steps;
  for (int i = 0; i <= n_steps; ++i) grid[i] = T - dt * i;
  grid.front() = T;
  grid.back() = t_min;
  return grid;
}

ProcessState sample_marginal(const ComplexSpectrogram& x, const ComplexSpectrogram& y, double t,
                             const Schedule& s, ComplexGaussianSampler& rng) {
  x.require_same_shape(y, "sample_marginal");
  const MeanWeights w = s.weights(t);
  const double sigma = std::sqrt(s.marginal_variance(t));
  ProcessState out{x.zeros_like(), t};
  for (std::size_t i = 0; i < x.size(); ++i) {
    cplx v = w.w_x * x[i] + w.w_y * y[i];
    if (sigma > 0.0) v += sigma * rng();
    out.coeffs[i] = v;
  }
  return out;
}

SdeCoefficients sde_coefficients(const Schedule& s, double tau, double t) {
  require_bridge(s, "sde_step");
  require_order(tau, t, s, "sde_step");
  const double s2_tau = s.sigma2(tau);
  if (!(s2_tau > 0.0)) throw std::invalid_argument("sde_step: sigma_tau^2 = 0, cannot step from t = 0");
  const double ratio = s.sigma2(t) / s2_tau;
  const double a_t = s.alpha(t);
  return {a_t * ratio / s.alpha(tau), a_t * (1.0 - ratio),
          a_t * std::sqrt(s.sigma2(t)) * std::sqrt(std::max(0.0, 1.0 - ratio))};
}

OdeCoefficients ode_coefficients(const Schedule& s, double tau, double t) {
  require_bridge(s, "ode_step");
  require_order(tau, t, s, "ode_step");
  const double a_t = s.alpha(t);
  const double sT2 = s.sigma_T2();
  const double s2_t = s.sigma2(t);
  const double sb2_t = s.sigma_bar2(t);
  const double sb2_tau = s.sigma_bar2(tau);
  if (tau == s.T()) {
    // sigma_bar_T = 0: the singular parts of the state and observation terms
    // cancel once x_T = y is substituted.
    return {0.0, a_t * sb2_t / sT2, a_t * s2_t / (s.alpha_T() * sT2)};
  }
  const double s2_tau = s.sigma2(tau);
  if (!(s2_tau > 0.0)) throw std::invalid_argument("ode_step: sigma_tau = 0, cannot step from t = 0");
  if (!(sb2_tau > 0.0)) throw std::invalid_argument("ode_step: sigma_bar_tau = 0 at interior tau");
  const double sig_t = std::sqrt(s2_t);
  const double sb_t = std::sqrt(sb2_t);
  const double sig_tau = std::sqrt(s2_tau);
  const double sb_tau = std::sqrt(sb2_tau);
  return {a_t * sig_t * sb_t / (s.alpha(tau) * sig_tau * sb_tau),
          a_t / sT2 * (sb2_t - sb_tau * sig_t * sb_t / sig_tau),
          a_t / (s.alpha_T() * sT2) * (s2_t - sig_tau * sig_t * sb_t / sb_tau)};
}

ProcessState sde_step(const ProcessState& state, const ComplexSpectrogram& x_hat, double t,
                      const Schedule& s, ComplexGaussianSampler& rng) {
  state.coeffs.require_same_shape(x_hat, "sde_step");
  const SdeCoefficients c = sde_coefficients(s, state.t, t);
  ProcessState out{state.coeffs.zeros_like(), t};
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    cplx v = c.state * state.coeffs[i] + c.estimate * x_hat[i];
    if (c.noise > 0.0) v += c.noise * rng();
    out.coeffs[i] = v;
  }
  return out;
}

ProcessState ode_step(const ProcessState& state, const ComplexSpectrogram& x_hat,
                      const ComplexSpectrogram& y, double t, const Schedule& s) {
  state.coeffs.require_same_shape(x_hat, "ode_step");
  state.coeffs.require_same_shape(y, "ode_step");
  const OdeCoefficients c = ode_coefficients(s, state.t, t);
  ProcessState out{state.coeffs.zeros_like(), t};
  for (std::size_t i = 0; i < x_hat.size(); ++i)
    out.coeffs[i] = c.state * state.coeffs[i] + c.estimate * x_hat[i] + c.observation * y[i];
  return out;
}

ComplexSpectrogram run_reverse(const ComplexSpectrogram& y, const Denoiser& denoiser,
                               const SamplerConfig& cfg, const Schedule& s,
                               const StepObserver& observer) {
  cfg.validate(s);
  const std::vector<double> grid = reverse_time_grid(s.T(), cfg.t_min, cfg.n_steps);
  const double limit = 1e6 * std::max(y.rms(), 1.0);
  ComplexGaussianSampler rng(cfg.seed);

  auto estimate_at = [&](const ProcessState& st, int step) {
    ComplexSpectrogram x_hat = denoiser.estimate(st.coeffs, y, st.t);
    if (!x_hat.same_shape(y))
      throw std::invalid_argument("run_reverse: denoiser output shape does not match the input");
    if (!x_hat.all_finite()) throw NumericalError("denoiser returned non-finite values", step);
    return x_hat;
  };

  if (cfg.kind == SamplerKind::kOUVEEM) {
    ProcessState st{y, s.T()};
    const double sigma_T = std::sqrt(s.marginal_variance(s.T()));
    for (cplx& c : st.coeffs.values()) c += sigma_T * rng();
    for (int i = 0; i < cfg.n_steps; ++i) {
      const ComplexSpectrogram x_hat = estimate_at(st, i);
      const ComplexSpectrogram score = score_from_estimate(st.coeffs, x_hat, y, st.t, s);
      const double tau = st.t;
      st = ouve_em_step(st, score, y, grid[i + 1], s, rng);
      check_state(st.coeffs, limit, i);
      if (observer) observer(StepRecord{i, tau, st.t, x_hat, st.coeffs});
    }
    return st.coeffs;
  }

  ProcessState st{y, s.T()};
  for (int i = 0; i <= cfg.n_steps; ++i) {
    const double t = (i < cfg.n_steps) ? grid[i + 1] : 0.0;
    const ComplexSpectrogram x_hat = estimate_at(st, i);
    const double tau = st.t;
    st = (cfg.kind == SamplerKind::kSBSDE) ? sde_step(st, x_hat, t, s, rng)
                                           : ode_step(st, x_hat, y, t, s);
    check_state(st.coeffs, limit, i);
    if (observer) observer(StepRecord{i, tau, st.t, x_hat, st.coeffs});
  }
  return st.coeffs;
}

ComplexSpectrogram ouve_conditional_score(const ComplexSpectrogram& x_t, const ComplexSpectrogram& x,
                                          const ComplexSpectrogram& y, double t, const Schedule& s) {
  require_ouve(s, "ouve_conditional_score");
  x_t.require_same_shape(x, "ouve_conditional_score");
  x_t.require_same_shape(y, "ouve_conditional_score");
  const double var = s.marginal_variance(t);
  if (!(var > 0.0)) throw std::invalid_argument("ouve_conditional_score: sigma_x(t) = 0");
  const MeanWeights w = s.weights(t);
  ComplexSpectrogram out = x_t.zeros_like();
  for (std::size_t i = 0; i < x_t.size(); ++i)
    out[i] = -(x_t[i] - (w.w_x * x[i] + w.w_y * y[i])) / var;
  return out;
}

ComplexSpectrogram score_from_estimate(const ComplexSpectrogram& x_t,
                                       const ComplexSpectrogram& x_hat,
                                       const ComplexSpectrogram& y, double t, const Schedule& s) {
  return ouve_conditional_score(x_t, x_hat, y, t, s);
}

ScoreTarget ouve_score_target(const ComplexSpectrogram& x, const ComplexSpectrogram& y, double t,
                              const Schedule& s, const ComplexSpectrogram& z) {
  require_ouve(s, "ouve_score_target");
  x.require_same_shape(y, "ouve_score_target");
  x.require_same_shape(z, "ouve_score_target");
  const MeanWeights w = s.weights(t);
  const double sigma = std::sqrt(s.marginal_variance(t));
  ScoreTarget out{x.zeros_like(), x.zeros_like()};
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.x_t[i] = w.w_x * x[i] + w.w_y * y[i] + sigma * z[i];
    out.target[i] = -z[i];
  }
  return out;
}

ProcessState ouve_em_step(const ProcessState& state, const ComplexSpectrogram& score,
                          const ComplexSpectrogram& y, double t, const Schedule& s,
                          ComplexGaussianSampler& rng) {
  require_ouve(s, "ouve_em_step");
  require_order(state.t, t, s, "ouve_em_step");
  state.coeffs.require_same_shape(score, "ouve_em_step");
  state.coeffs.require_same_shape(y, "ouve_em_step");
  const double dt = state.t - t;
  const double gamma = s.ouve_params().gamma;
  const double g2 = s.drift_diffusion(state.t).g2;
  const double noise = std::sqrt(g2 * dt);
  ProcessState out{state.coeffs.zeros_like(), t};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const cplx x = state.coeffs[i];
    const cplx drift = gamma * (y[i] - x) - g2 * score[i];
    out.coeffs[i] = x - drift * dt + noise * rng();
  }
  return out;
}

}  // namespace sbse
