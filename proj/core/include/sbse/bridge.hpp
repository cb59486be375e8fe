// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sbse/denoiser.hpp"
#include "sbse/rng.hpp"
#include "sbse/schedule.hpp"
#include "sbse/transform.hpp"

namespace sbse {

enum class SamplerKind { kSBSDE, kSBODE, kOUVEEM };

std::string to_string(SamplerKind kind);
/// "sde", "ode" or "ouve" (also accepts "sb-sde", "sb-ode", "ouve-em").
SamplerKind sampler_kind_from_string(const std::string& name);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kSBSDE;
  int n_steps = 50;
  double t_min = 1e-4;
  std::uint64_t seed = 0;

  void validate(const Schedule& s) const;
};

struct ProcessState {
  ComplexSpectrogram coeffs;
  double t = 0.0;
};

/// Uniform reverse grid T = t_0 > t_1 > ... > t_n = t_min (n_steps + 1 points).
std::vector<double> reverse_time_grid(double T, double t_min, int n_steps);

/// Draws x_t = w_x(t) x + w_y(t) y + sigma_x(t) z with z ~ N_C(0, I).
ProcessState sample_marginal(const ComplexSpectrogram& x, const ComplexSpectrogram& y, double t,
                             const Schedule& s, ComplexGaussianSampler& rng);

/// Scalar coefficients of one stochastic bridge step tau -> t:
/// x_t = state * x_tau + estimate * x_hat + noise * z.
struct SdeCoefficients {
  double state;
  double estimate;
  double noise;
};
SdeCoefficients sde_coefficients(const Schedule& s, double tau, double t);

/// Scalar coefficients of one deterministic bridge step tau -> t:
/// x_t = state * x_tau + estimate * x_hat + observation * y.
/// At tau = T (sigma_bar_T = 0) the state term is folded into the
/// observation term, which is valid because the reverse process starts at
/// x_T = y; `state` is then 0.
struct OdeCoefficients {
  double state;
  double estimate;
  double observation;
};
OdeCoefficients ode_coefficients(const Schedule& s, double tau, double t);

ProcessState sde_step(const ProcessState& state, const ComplexSpectrogram& x_hat, double t,
                      const Schedule& s, ComplexGaussianSampler& rng);
ProcessState ode_step(const ProcessState& state, const ComplexSpectrogram& x_hat,
                      const ComplexSpectrogram& y, double t, const Schedule& s);

struct StepRecord {
  int step;
  double tau;
  double t;
  const ComplexSpectrogram& estimate;
  const ComplexSpectrogram& state;  // after the step, at time t
};
using StepObserver = std::function<void(const StepRecord&)>;

/// Integrates the reverse process from the observation.
///
/// Bridge samplers start at x_T = y, step over reverse_time_grid() and then
/// take a final step t_min -> 0, which the closed forms resolve exactly
/// (sigma_0 = 0); the denoiser is called once per step, n_steps + 1 times in
/// total, and x_0 is returned. The OUVE baseline starts from
/// x_T ~ N_C(y, sigma_x^2(T) I), converts each data estimate into the
/// conditional score and takes n_steps Euler-Maruyama steps down to t_min.
///
/// Throws NumericalError (carrying the step index) on non-finite states or
/// when the state RMS exceeds 1e6 * max(rms(y), 1).
ComplexSpectrogram run_reverse(const ComplexSpectrogram& y, const Denoiser& denoiser,
                               const SamplerConfig& cfg, const Schedule& s,
                               const StepObserver& observer = {});

// OUVE diffusion baseline ----------------------------------------------------

/// Gradient of log p_{t|0}(x_t | x, y) with respect to conj(x_t), i.e.
/// (d/dRe + j d/dIm) / 2: -(x_t - mu_x(t)) / sigma_x^2(t).
ComplexSpectrogram ouve_conditional_score(const ComplexSpectrogram& x_t, const ComplexSpectrogram& x,
                                          const ComplexSpectrogram& y, double t, const Schedule& s);

/// Score implied by a data estimate: the conditional score with x := x_hat.
ComplexSpectrogram score_from_estimate(const ComplexSpectrogram& x_t,
                                       const ComplexSpectrogram& x_hat,
                                       const ComplexSpectrogram& y, double t, const Schedule& s);

struct ScoreTarget {
  ComplexSpectrogram x_t;
  /// Regression target for sigma_x(t) * s_theta: equal to -z.
  ComplexSpectrogram target;
};
ScoreTarget ouve_score_target(const ComplexSpectrogram& x, const ComplexSpectrogram& y, double t,
                              const Schedule& s, const ComplexSpectrogram& z);

/// One Euler-Maruyama step of the reverse OUVE SDE from state.t to t < state.t.
ProcessState ouve_em_step(const ProcessState& state, const ComplexSpectrogram& score,
                          const ComplexSpectrogram& y, double t, const Schedule& s,
                          ComplexGaussianSampler& rng);

}  // namespace sbse
