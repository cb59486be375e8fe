// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace sbse::cli;

int main(int argc, char** argv) {
  CLI::App app{"Schrodinger-bridge speech enhancement toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "sbse 0.1.0");

  GlobalOptions global;
  for (int i = 0; i < argc; ++i) global.argv.emplace_back(argv[i]);
  std::optional<std::string> config_file;
  std::string out_dir = "out";
  app.add_option("--config", config_file, "JSON config file (flags override its values)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", global.seed, "Master seed applied to every seeded section");
  app.add_option("--out-dir", out_dir, "Directory receiving all outputs")->capture_default_str();
  app.add_option("--jobs", global.jobs, "Worker threads for per-utterance work")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic paired dataset");
  gen_cmd->add_option("--task", gen.task, "denoise or dereverb");
  gen_cmd->add_option("--n-examples", gen.n_examples);
  gen_cmd->add_option("--duration", gen.duration_s, "Seconds per example (>= 1)");
  gen_cmd->add_option("--snr-range", gen.snr_range_db, "lo,hi in dB")->delimiter(',');
  gen_cmd->add_option("--t60-range", gen.t60_range_s, "lo,hi in seconds")->delimiter(',');
  gen_cmd->add_option("--clean-kind", gen.clean_kind, "harmonic, chirp or ar2");
  gen_cmd->add_option("--noise-kind", gen.noise_kind, "white or pink");
  gen_cmd->add_option("--clean-dir", gen.clean_dir, "Directory of clean WAVs replacing synthetic signals");
  gen_cmd->add_option("--noise-dir", gen.noise_dir, "Directory of noise WAVs replacing synthetic noise");

  ScheduleDumpOptions dump;
  auto* dump_cmd = app.add_subcommand("schedule-dump", "Tabulate mean weights and variance over t");
  dump_cmd->add_option("--schedules", dump.schedules, "Comma-separated schedule names")
      ->delimiter(',')
      ->capture_default_str();
  dump_cmd->add_option("--points", dump.points, "Uniform points on [0, T]")->capture_default_str();

  TrainOptions tr;
  std::string train_data;
  std::optional<std::string> val_data, resume;
  auto* train_cmd = app.add_subcommand("train", "Train the tiny denoiser");
  train_cmd->add_option("--data", train_data, "Dataset directory with manifest.jsonl")->required();
  train_cmd->add_option("--val-data", val_data, "Validation dataset directory");
  train_cmd->add_option("--resume", resume, "Continue from a checkpoint");
  train_cmd->add_option("--schedule", tr.schedule, "sbve, sbvp or ouve");
  train_cmd->add_option("--lr", tr.lr);
  train_cmd->add_option("--batch-size", tr.batch_size);
  train_cmd->add_option("--max-epochs", tr.max_epochs);
  train_cmd->add_option("--max-steps", tr.max_steps, "Optimizer step budget (0 = none)");
  train_cmd->add_option("--patience", tr.patience);
  train_cmd->add_option("--lambda-aux", tr.lambda_aux);
  train_cmd->add_option("--aux-kind", tr.aux_kind, "none, l1 or soft-sisdr");
  train_cmd->add_option("--ema-decay", tr.ema_decay);
  train_cmd->add_option("--segment-frames", tr.segment_frames);
  train_cmd->add_option("--validation", tr.validation, "loss or si_sdr");
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths")->delimiter(',');

  EnhanceOptions en;
  std::optional<std::string> en_input, en_data, en_ckpt;
  auto* enhance_cmd = app.add_subcommand("enhance", "Run the reverse process on noisy audio");
  enhance_cmd->add_option("--input", en_input, "Single WAV file");
  enhance_cmd->add_option("--data", en_data, "Paired dataset directory");
  enhance_cmd->add_option("--checkpoint", en_ckpt, "Trained checkpoint");
  enhance_cmd->add_flag("--oracle", en.oracle, "Use the clean reference as the denoiser");
  enhance_cmd->add_flag("--identity", en.identity, "Denoiser that returns the observation");
  enhance_cmd->add_option("--sampler", en.sampler, "sde, ode or ouve");
  enhance_cmd->add_option("--steps", en.steps, "Step count; several values run a sweep")->delimiter(',');
  enhance_cmd->add_option("--schedule", en.schedule, "Schedule for --oracle/--identity runs");
  enhance_cmd->add_option("--weights", en.weights, "ema or raw")->capture_default_str();
  enhance_cmd->add_flag("--trajectory", en.trajectory,
                        "Write per-step state RMS and distance to the clean reference");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo moment checks of the closed forms");
  sim_cmd->add_option("--toy-dim", sim.toy_dim, "Complex dimension of the toy endpoints");
  sim_cmd->add_option("--schedule", sim.schedules, "Comma-separated schedule names")->delimiter(',');
  sim_cmd->add_option("--trajectories", sim.trajectories);
  sim_cmd->add_option("--times", sim.times, "Comma-separated times in (0, T)")->delimiter(',');
  sim_cmd->add_option("--variance-scale", sim.variance_scale, "Test hook: inflate the draw variance")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (config_file) global.config_file = *config_file;
  global.out_dir = out_dir;

  return guarded([&] {
    if (*gen_cmd) return cmd_gen_data(global, gen);
    if (*dump_cmd) return cmd_schedule_dump(global, dump);
    if (*train_cmd) {
      tr.data_dir = train_data;
      if (val_data) tr.val_dir = *val_data;
      if (resume) tr.resume = *resume;
      return cmd_train(global, tr);
    }
    if (*enhance_cmd) {
      if (en_input) en.input = *en_input;
      if (en_data) en.data_dir = *en_data;
      if (en_ckpt) en.checkpoint = *en_ckpt;
      return cmd_enhance(global, en);
    }
    return cmd_simulate(global, sim);
  });
}
