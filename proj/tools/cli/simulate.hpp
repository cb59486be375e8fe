// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"

namespace sbse::cli {

/// Moment check of one (schedule, test, t) cell. Every real coordinate of
/// every trajectory is standardized with the analytic mean and variance, so
/// the pooled draws are N(0, 1) when the sampler is right.
struct SimulationRow {
  std::string schedule;
  std::string test;  // "forward" (marginal draw) or "one_step" (single SDE step from T)
  double t = 0.0;
  long trajectories = 0;
  double analytic_mean_re = 0.0;   // first coordinate, real part
  double empirical_mean_re = 0.0;
  double mean_z = 0.0;             // pooled standardized mean
  double mean_se = 0.0;
  double analytic_var = 0.0;       // complex variance sigma_x^2(t)
  double empirical_var = 0.0;
  double var_se = 0.0;
  bool mean_pass = false;
  bool var_pass = false;
};

struct SimulationResult {
  std::vector<SimulationRow> rows;
  bool all_pass() const;
  std::string to_csv() const;
};

/// Monte-Carlo check of the forward marginals of every selected schedule
/// and, for the bridge schedules, of a single reverse SDE step from T with
/// the exact data estimate. Bounds are three standard errors.
SimulationResult run_simulation(const SimulateConfig& cfg, std::uint64_t seed);

}  // namespace sbse::cli
