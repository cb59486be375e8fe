// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbse/bridge.hpp"
#include "sbse/loss.hpp"
#include "sbse/schedule.hpp"
#include "sbse/synth.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/transform.hpp"

namespace sbse::cli {

inline constexpr int kConfigSchemaVersion = 1;

struct SimulateConfig {
  int toy_dim = 2;
  long trajectories = 20000;
  std::vector<std::string> schedules = {"sbve", "sbvp", "ouve"};
  std::vector<double> times = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  /// Test hook: multiplies the variance of the simulated draws.
  double variance_scale = 1.0;

  void validate() const;
};

/// Everything a subcommand may read. Documented schema (all sections and keys
/// optional, unknown keys rejected):
///
///   {"schema_version": 1,
///    "seed": 0,
///    "dataset":   {task, n_examples, duration_s, snr_range_db, t60_range_s,
///                  clean_kind, noise_kind, master_seed, sample_rate,
///                  clean_dir, noise_dir},
///    "transform": {win_size, hop_size, compression_a, scale_b, window, sample_rate},
///    "schedule":  {name, T, t_min, and the schedule's parameters},
///    "model":     {hidden, time_features, init_seed},
///    "train":     {lambda_aux, aux_kind, snr_max_db, lr, batch_size, ema_decay,
///                  max_epochs, patience, max_steps, segment_frames, validation, seed},
///    "sampler":   {kind, n_steps, t_min, seed},
///    "simulate":  {toy_dim, trajectories, schedules, times}}
struct RunConfig {
  std::optional<std::uint64_t> seed;
  DatasetSpec dataset;
  TransformConfig transform;
  nlohmann::json schedule = {{"name", "sbve"}};
  TinyDenoiserConfig model;
  TrainConfig train;
  SamplerConfig sampler;
  SimulateConfig simulate;

  /// Copies `seed`, when set, into every seeded section.
  void apply_global_seed();
  Schedule make_schedule() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

}  // namespace sbse::cli
