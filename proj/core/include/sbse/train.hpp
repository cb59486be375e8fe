// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sbse/loss.hpp"
#include "sbse/rng.hpp"
#include "sbse/schedule.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/transform.hpp"

namespace sbse {

/// 1 / max|x|, or 1 for an all-zero signal.
double peak_normalization_scale(const TimeSignal& input);

/// Analyzed (clean, noisy) pair, both scaled by the noisy input's peak
/// normalization factor.
struct TrainingExample {
  ComplexSpectrogram clean;
  ComplexSpectrogram noisy;
  double scale = 1.0;
};
TrainingExample make_training_example(const TimeSignal& clean, const TimeSignal& noisy,
                                      const TransformConfig& cfg);

/// One fully specified draw of the objective: endpoints, process time and the
/// complex Gaussian noise defining x_t.
struct TrainingItem {
  ComplexSpectrogram x;
  ComplexSpectrogram y;
  TimeSignal x_time;  // synthesize(x); empty when no auxiliary loss is used
  double t = 0.0;
  ComplexSpectrogram z;
};
TrainingItem make_training_item(ComplexSpectrogram x, ComplexSpectrogram y, double t,
                                ComplexSpectrogram z, const TrainConfig& cfg);

/// Objective of a single item for `model`; when `grad` is nonempty the
/// parameter gradient is accumulated into it.
LossTerms loss_and_gradient(const TinyDenoiser& model, const TrainingItem& item, const Schedule& s,
                            const TrainConfig& cfg, std::span<double> grad);

class Adam {
 public:
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  long steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  void restore(long steps, std::vector<double> m, std::vector<double> v);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// w_ema <- d * w_ema + (1 - d) * w.
class Ema {
 public:
  Ema(std::span<const double> init, double decay) : weights_(init.begin(), init.end()), decay_(decay) {}

  void update(std::span<const double> w);
  const std::vector<double>& weights() const { return weights_; }
  void restore(std::vector<double> w) { weights_ = std::move(w); }

 private:
  std::vector<double> weights_;
  double decay_;
};

/// Everything needed to continue a run bit-for-bit.
struct TrainerState {
  long step = 0;
  int epoch = 0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::vector<double> ema;
  std::string rng;
};

class Trainer {
 public:
  Trainer(TinyDenoiser model, Schedule schedule, TrainConfig cfg);

  /// Random crop of a random example, t ~ U[t_min, T] and z ~ N_C(0, I).
  TrainingItem draw_item(const std::vector<TrainingExample>& data);

  /// One Adam + EMA update on the mean objective of `batch`. Returns the
  /// mean loss before the update.
  double step(std::span<const TrainingItem> batch);
  /// Draws batch_size items from `data` and steps.
  double step(const std::vector<TrainingExample>& data);

  const TinyDenoiser& model() const { return model_; }
  TinyDenoiser ema_model() const { return TinyDenoiser(model_.config(), ema_.weights()); }
  const Schedule& schedule() const { return schedule_; }
  const TrainConfig& config() const { return cfg_; }
  long steps_taken() const { return adam_.steps(); }
  int epoch() const { return epoch_; }
  void set_epoch(int e) { epoch_ = e; }

  TrainerState state() const;
  void restore(const TrainerState& st);

 private:
  TinyDenoiser model_;
  Schedule schedule_;
  TrainConfig cfg_;
  Adam adam_;
  Ema ema_;
  Rng rng_;
  int epoch_ = 0;
  std::vector<double> grad_;
};

struct CurvePoint {
  long step;
  int epoch;
  double train_loss;
  /// Validation metric at the end of an epoch (NaN on other steps). Lower
  /// is better: mean loss, or negated mean SI-SDR.
  double validation;
};

struct TrainResult {
  TinyDenoiser model;
  /// EMA weights of the best validation epoch (final EMA when no
  /// validation set is given).
  TinyDenoiser ema;
  std::vector<CurvePoint> curve;
  bool stopped_early = false;
};

/// Fixed validation draws (deterministic in cfg.seed).
std::vector<TrainingItem> make_validation_items(const std::vector<TrainingExample>& data,
                                                const Schedule& s, const TrainConfig& cfg);
/// Validation metric of `model` on `items`; lower is better.
double validation_metric(const TinyDenoiser& model, const std::vector<TrainingItem>& items,
                         const Schedule& s, const TrainConfig& cfg);

using TrainProgress = std::function<void(const CurvePoint&)>;

/// Minibatch training with EMA and patience-based early stopping. Continues
/// from the trainer's current epoch, so a restored trainer resumes.
/// Throws NumericalError on a non-finite loss.
TrainResult train(Trainer& trainer, const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const TrainProgress& progress = {});

TrainResult train(const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const Schedule& s,
                  const TrainConfig& cfg, const TinyDenoiserConfig& model_cfg,
                  const TrainProgress& progress = {});

}  // namespace sbse
