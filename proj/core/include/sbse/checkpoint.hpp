// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbse/loss.hpp"
#include "sbse/schedule.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/train.hpp"
#include "sbse/transform.hpp"

namespace sbse {

inline constexpr int kCheckpointVersion = 1;

/// JSON container of a TinyDenoiser run. Weights are stored as shortest
/// round-trip decimal doubles, so save/load is lossless.
struct Checkpoint {
  TinyDenoiserConfig model;
  std::vector<double> weights;
  std::vector<double> ema_weights;
  TrainConfig train;
  TransformConfig transform;
  Schedule schedule = Schedule::sb_ve();
  /// Optimizer, EMA and RNG state for resuming; absent in export-only files.
  std::optional<TrainerState> trainer_state;

  TinyDenoiser raw_model() const { return TinyDenoiser(model, weights); }
  TinyDenoiser ema_model() const { return TinyDenoiser(model, ema_weights); }
};

/// Snapshot of a trainer. `ema_weights` defaults to the trainer's current EMA.
Checkpoint make_checkpoint(const Trainer& trainer, const TransformConfig& transform,
                           std::optional<std::vector<double>> ema_weights = std::nullopt);

/// Trainer positioned exactly where the checkpoint was taken.
Trainer resume_trainer(const Checkpoint& ckpt);

std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Validates the version and every stored shape against the model config;
/// throws DataError on mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sbse
