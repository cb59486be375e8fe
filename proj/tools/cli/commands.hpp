// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace sbse::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
  kExitStatistical = 5,
};

struct GlobalOptions {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  /// Command line as typed, echoed into the run manifest.
  std::vector<std::string> argv;
};

/// Flag overrides; unset fields keep the config file (or default) value.
struct GenDataOptions {
  std::optional<std::string> task;
  std::optional<int> n_examples;
  std::optional<double> duration_s;
  std::optional<std::vector<double>> snr_range_db;
  std::optional<std::vector<double>> t60_range_s;
  std::optional<std::string> clean_kind;
  std::optional<std::string> noise_kind;
  std::optional<std::string> clean_dir;
  std::optional<std::string> noise_dir;
};

struct ScheduleDumpOptions {
  std::vector<std::string> schedules = {"sbve", "sbvp", "ouve"};
  int points = 101;
};

struct TrainOptions {
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> val_dir;
  std::optional<std::filesystem::path> resume;
  std::optional<std::string> schedule;
  std::optional<double> lr;
  std::optional<int> batch_size;
  std::optional<int> max_epochs;
  std::optional<long> max_steps;
  std::optional<int> patience;
  std::optional<double> lambda_aux;
  std::optional<std::string> aux_kind;
  std::optional<double> ema_decay;
  std::optional<int> segment_frames;
  std::optional<std::string> validation;
  std::optional<std::vector<int>> hidden;
};

struct EnhanceOptions {
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> checkpoint;
  bool oracle = false;
  bool identity = false;  // stub denoiser returning the observation
  std::optional<std::string> sampler;
  std::optional<std::vector<int>> steps;
  std::optional<std::string> schedule;
  std::string weights = "ema";  // ema | raw
  /// Per-utterance CSV of step, t, state RMS and distance-to-clean RMS.
  bool trajectory = false;
};

struct SimulateOptions {
  std::optional<int> toy_dim;
  std::optional<long> trajectories;
  std::optional<std::vector<std::string>> schedules;
  std::optional<std::vector<double>> times;
  double variance_scale = 1.0;
};

/// Each command writes under global.out_dir, echoes the effective config and
/// a run manifest, and returns an exit code. Errors propagate as exceptions;
/// exit_code_for() maps them.
int cmd_gen_data(const GlobalOptions& global, const GenDataOptions& opts);
int cmd_schedule_dump(const GlobalOptions& global, const ScheduleDumpOptions& opts);
int cmd_train(const GlobalOptions& global, const TrainOptions& opts);
int cmd_enhance(const GlobalOptions& global, const EnhanceOptions& opts);
int cmd_simulate(const GlobalOptions& global, const SimulateOptions& opts);

/// Runs `fn`, printing any exception to stderr and mapping it to an exit code.
template <typename Fn>
int guarded(Fn&& fn);
int exit_code_for(const std::exception& e);

}  // namespace sbse::cli

#include <iostream>

template <typename Fn>
int sbse::cli::guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
