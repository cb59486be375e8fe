// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulate.hpp"

#include <cmath>
#include <sstream>

#include "sbse/bridge.hpp"
#include "sbse/error.hpp"
#include "sbse/rng.hpp"

namespace sbse::cli {

namespace {

constexpr double kBound = 3.0;

// One column per trajectory, one row per toy dimension.
ComplexSpectrogram tiled(const std::vector<cplx>& v, long trajectories) {
  const int dim = static_cast<int>(v.size());
  ComplexSpectrogram out(dim, static_cast<int>(trajectories));
  for (int m = 0; m < out.frames(); ++m)
    for (int k = 0; k < dim; ++k) out.at(k, m) = v[static_cast<std::size_t>(k)];
  return out;
}

SimulationRow check(const std::string& schedule, const std::string& test, double t,
                    const ComplexSpectrogram& draws, const ComplexSpectrogram& mean, double var,
                    double variance_scale) {
  SimulationRow r;
  r.schedule = schedule;
  r.test = test;
  r.t = t;
  r.trajectories = draws.frames();
  r.analytic_var = var;
  r.analytic_mean_re = mean.at(0, 0).real();
  const double sd = std::sqrt(var / 2.0);
  double sum = 0.0, sum_sq = 0.0, first = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    // The test hook inflates the deviation of every draw from its mean.
    const cplx dev = std::sqrt(variance_scale) * (draws[i] - mean[i]);
    for (double u : {dev.real() / sd, dev.imag() / sd}) {
      sum += u;
      sum_sq += u * u;
    }
  }
  for (int m = 0; m < draws.frames(); ++m)
    first += mean.at(0, m).real() + std::sqrt(variance_scale) * (draws.at(0, m) - mean.at(0, m)).real();
  const double n = 2.0 * static_cast<double>(draws.size());
  r.empirical_mean_re = first / draws.frames();
  r.mean_z = sum / n;
  r.mean_se = 1.0 / std::sqrt(n);
  const double v = sum_sq / n;  // known mean, so E[v] = 1 and Var[v] = 2 / n
  r.empirical_var = v * var;
  r.var_se = std::sqrt(2.0 / n) * var;
  r.mean_pass = std::abs(r.mean_z) <= kBound * r.mean_se;
  r.var_pass = std::abs(v - 1.0) <= kBound * std::sqrt(2.0 / n);
  return r;
}

}  // namespace

bool SimulationResult::all_pass() const {
  for (const auto& r : rows)
    if (!r.mean_pass || !r.var_pass) return false;
  return !rows.empty();
}

std::string SimulationResult::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "schedule,test,t,trajectories,analytic_mean_re,empirical_mean_re,mean_z,mean_se,"
        "analytic_var,empirical_var,var_se,mean_pass,var_pass\n";
  for (const auto& r : rows)
    os << r.schedule << ',' << r.test << ',' << r.t << ',' << r.trajectories << ','
       << r.analytic_mean_re << ',' << r.empirical_mean_re << ',' << r.mean_z << ',' << r.mean_se
       << ',' << r.analytic_var << ',' << r.empirical_var << ',' << r.var_se << ','
       << (r.mean_pass ? 1 : 0) << ',' << (r.var_pass ? 1 : 0) << '\n';
  return os.str();
}

SimulationResult run_simulation(const SimulateConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SimulationResult result;
  ComplexGaussianSampler endpoint_rng(derive_seed(seed, 0));
  std::vector<cplx> x(static_cast<std::size_t>(cfg.toy_dim)), y(x.size());
  for (auto& v : x) v = endpoint_rng();
  for (auto& v : y) v = endpoint_rng();
  const ComplexSpectrogram X = tiled(x, cfg.trajectories);
  const ComplexSpectrogram Y = tiled(y, cfg.trajectories);

  for (std::size_t si = 0; si < cfg.schedules.size(); ++si) {
    const Schedule s = Schedule::from_name(cfg.schedules[si]);
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
      const double t = cfg.times[ti];
      if (!(t > 0.0 && t < s.T()))
        throw ConfigError("simulate: times must lie strictly inside (0, T)");
      const MeanWeights w = s.weights(t);
      ComplexSpectrogram mean = X.zeros_like();
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = w.w_x * X[i] + w.w_y * Y[i];
      const double var = s.marginal_variance(t);

      ComplexGaussianSampler rng(derive_seed(seed, 1 + 2 * (si * cfg.times.size() + ti)));
      const ProcessState forward = sample_marginal(X, Y, t, s, rng);
      result.rows.push_back(check(s.name(), "forward", t, forward.coeffs, mean, var, cfg.variance_scale));

      if (!s.is_bridge()) continue;
      ComplexGaussianSampler step_rng(derive_seed(seed, 2 + 2 * (si * cfg.times.size() + ti)));
      const ProcessState start{Y, s.T()};
      const ProcessState stepped = sde_step(start, X, t, s, step_rng);
      result.rows.push_back(check(s.name(), "one_step", t, stepped.coeffs, mean, var, cfg.variance_scale));
    }
  }
  return result;
}

}  // namespace sbse::cli
