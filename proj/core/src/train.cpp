// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sbse/error.hpp"
#include "sbse/metrics.hpp"

namespace sbse {

namespace {

ComplexSpectrogram draw_noise(const ComplexSpectrogram& like, Rng& rng) {
  ComplexSpectrogram z = like.zeros_like();
  const double s = std::numbers::sqrt2 / 2.0;
  for (cplx& c : z.values()) {
    const double re = rng.normal();
    const double im = rng.normal();
    c = {s * re, s * im};
  }
  return z;
}

bool is_stft_grid(const ComplexSpectrogram& x) {
  return x.bins() == x.transform().num_bins() && x.frames() > 0;
}

}  // namespace

double peak_normalization_scale(const TimeSignal& input) {
  double peak = 0.0;
  for (double v : input.samples) peak = std::max(peak, std::abs(v));
  return peak > 0.0 ? 1.0 / peak : 1.0;
}

TrainingExample make_training_example(const TimeSignal& clean, const TimeSignal& noisy,
                                      const TransformConfig& cfg) {
  if (clean.size() != noisy.size())
    throw DataError("training pair: clean and noisy lengths differ");
  const double scale = peak_normalization_scale(noisy);
  TimeSignal c = clean;
  TimeSignal n = noisy;
  for (double& v : c.samples) v *= scale;
  for (double& v : n.samples) v *= scale;
  return {analyze(c, cfg), analyze(n, cfg), scale};
}

TrainingItem make_training_item(ComplexSpectrogram x, ComplexSpectrogram y, double t,
                                ComplexSpectrogram z, const TrainConfig& /*cfg*/) {
  x.require_same_shape(y, "training item");
  x.require_same_shape(z, "training item");
  TrainingItem item{std::move(x), std::move(y), {}, t, std::move(z)};
  if (is_stft_grid(item.x)) item.x_time = synthesize(item.x, item.x.transform());
  return item;
}

LossTerms loss_and_gradient(const TinyDenoiser& model, const TrainingItem& item, const Schedule& s,
                            const TrainConfig& cfg, std::span<double> grad) {
  const MeanWeights w = s.weights(item.t);
  const double sigma = std::sqrt(s.marginal_variance(item.t));
  ComplexSpectrogram x_t = item.x.zeros_like();
  for (std::size_t i = 0; i < x_t.size(); ++i)
    x_t[i] = w.w_x * item.x[i] + w.w_y * item.y[i] + sigma * item.z[i];

  TinyDenoiser::Cache cache;
  const bool want_grad = !grad.empty();
  const ComplexSpectrogram x_hat = model.forward(x_t, item.y, item.t, want_grad ? &cache : nullptr);

  const bool use_aux = cfg.aux_kind != AuxLossKind::kNone;
  TimeSignal x_hat_time;
  if (use_aux) {
    if (item.x_time.samples.empty())
      throw std::invalid_argument("training item: auxiliary loss needs the time-domain target");
    x_hat_time = synthesize(x_hat, item.x.transform());
  }
  if (!want_grad) return data_prediction_loss(x_hat, item.x, x_hat_time, item.x_time, cfg);

  LossGradient lg;
  const LossTerms terms = data_prediction_loss_grad(x_hat, item.x, x_hat_time, item.x_time, cfg, lg);
  if (use_aux && cfg.lambda_aux > 0.0) {
    const ComplexSpectrogram back = synthesize_vjp(x_hat, lg.time, item.x.transform());
    for (std::size_t i = 0; i < back.size(); ++i) lg.spectral[i] += back[i];
  }
  model.backward(cache, lg.spectral, grad);
  return terms;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

void Adam::restore(long steps, std::vector<double> m, std::vector<double> v) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw DataError("adam: restored moments have the wrong size");
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

void Ema::update(std::span<const double> w) {
  if (w.size() != weights_.size()) throw std::invalid_argument("ema: size mismatch");
  for (std::size_t i = 0; i < w.size(); ++i)
    weights_[i] = decay_ * weights_[i] + (1.0 - decay_) * w[i];
}

Trainer::Trainer(TinyDenoiser model, Schedule schedule, TrainConfig cfg)
    : model_(std::move(model)),
      schedule_(schedule),
      cfg_(cfg),
      adam_(model_.num_parameters(), cfg.lr),
      ema_(model_.parameters(), cfg.ema_decay),
      rng_(cfg.seed),
      grad_(model_.num_parameters(), 0.0) {
  cfg_.validate();
}

TrainingItem Trainer::draw_item(const std::vector<TrainingExample>& data) {
  if (data.empty()) throw DataError("training: empty dataset");
  const TrainingExample& ex = data[rng_.index(data.size())];
  const int frames = ex.clean.frames();
  const int seg = std::min(cfg_.segment_frames, frames);
  const int start = frames > seg ? static_cast<int>(rng_.index(static_cast<std::uint64_t>(frames - seg + 1))) : 0;
  ComplexSpectrogram x = ex.clean.crop_frames(start, seg);
  ComplexSpectrogram y = ex.noisy.crop_frames(start, seg);
  const double t = rng_.uniform(schedule_.t_min(), schedule_.T());
  ComplexSpectrogram z = draw_noise(x, rng_);
  return make_training_item(std::move(x), std::move(y), t, std::move(z), cfg_);
}

double Trainer::step(std::span<const TrainingItem> batch) {
  if (batch.empty()) throw DataError("training: empty batch");
  std::fill(grad_.begin(), grad_.end(), 0.0);
  double total = 0.0;
  for (const TrainingItem& item : batch)
    total += loss_and_gradient(model_, item, schedule_, cfg_, grad_).total;
  const double inv = 1.0 / static_cast<double>(batch.size());
  const double loss = total * inv;
  if (!std::isfinite(loss)) throw NumericalError("training loss is not finite", adam_.steps());
  for (double& g : grad_) g *= inv;
  adam_.step(model_.parameters(), grad_);
  ema_.update(model_.parameters());
  return loss;
}

double Trainer::step(const std::vector<TrainingExample>& data) {
  std::vector<TrainingItem> batch;
  batch.reserve(static_cast<std::size_t>(cfg_.batch_size));
  for (int i = 0; i < cfg_.batch_size; ++i) batch.push_back(draw_item(data));
  return step(std::span<const TrainingItem>(batch));
}

TrainerState Trainer::state() const {
  return {adam_.steps(), epoch_, adam_.first_moment(), adam_.second_moment(), ema_.weights(),
          rng_.state()};
}

void Trainer::restore(const TrainerState& st) {
  adam_.restore(st.step, st.adam_m, st.adam_v);
  if (st.ema.size() != model_.num_parameters()) throw DataError("trainer: EMA size mismatch");
  ema_.restore(st.ema);
  rng_.set_state(st.rng);
  epoch_ = st.epoch;
}

std::vector<TrainingItem> make_validation_items(const std::vector<TrainingExample>& data,
                                                const Schedule& s, const TrainConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0x5eed));
  std::vector<TrainingItem> items;
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const TrainingExample& ex = data[i];
    const int frames = ex.clean.frames();
    const int seg = std::min(cfg.segment_frames, frames);
    const int start = (frames - seg) / 2;
    ComplexSpectrogram x = ex.clean.crop_frames(start, seg);
    ComplexSpectrogram y = ex.noisy.crop_frames(start, seg);
    const double t = s.t_min() + (s.T() - s.t_min()) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    ComplexSpectrogram z = draw_noise(x, rng);
    items.push_back(make_training_item(std::move(x), std::move(y), t, std::move(z), cfg));
  }
  return items;
}

double validation_metric(const TinyDenoiser& model, const std::vector<TrainingItem>& items,
                         const Schedule& s, const TrainConfig& cfg) {
  if (items.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const TrainingItem& item : items) {
    if (cfg.validation == ValidationMetric::kLoss) {
      acc += loss_and_gradient(model, item, s, cfg, {}).total;
      continue;
    }
    const MeanWeights w = s.weights(item.t);
    const double sigma = std::sqrt(s.marginal_variance(item.t));
    ComplexSpectrogram x_t = item.x.zeros_like();
    for (std::size_t i = 0; i < x_t.size(); ++i)
      x_t[i] = w.w_x * item.x[i] + w.w_y * item.y[i] + sigma * item.z[i];
    const TimeSignal est = synthesize(model.estimate(x_t, item.y, item.t), item.x.transform());
    acc -= si_sdr(item.x_time.samples, est.samples);
  }
  return acc / static_cast<double>(items.size());
}

TrainResult train(Trainer& trainer, const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const TrainProgress& progress) {
  if (train_set.empty()) throw DataError("training: empty dataset");
  const TrainConfig& cfg = trainer.config();
  const std::vector<TrainingItem> val_items = make_validation_items(val_set, trainer.schedule(), cfg);
  const long steps_per_epoch =
      (static_cast<long>(train_set.size()) + cfg.batch_size - 1) / cfg.batch_size;

  TrainResult result{trainer.model(), trainer.ema_model(), {}, false};
  double best = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  bool budget_spent = false;
  for (int epoch = trainer.epoch(); epoch < cfg.max_epochs && !budget_spent; ++epoch) {
    bool validated = false;
    for (long i = 0; i < steps_per_epoch; ++i) {
      if (cfg.max_steps > 0 && trainer.steps_taken() >= cfg.max_steps) {
        budget_spent = true;
        break;
      }
      const double loss = trainer.step(train_set);
      CurvePoint pt{trainer.steps_taken(), epoch, loss, std::numeric_limits<double>::quiet_NaN()};
      // Validate at the end of every epoch and when the step budget runs out.
      const bool last_in_epoch = i + 1 == steps_per_epoch;
      const bool last_in_budget = cfg.max_steps > 0 && trainer.steps_taken() >= cfg.max_steps;
      if ((last_in_epoch || last_in_budget) && !val_items.empty()) {
        pt.validation = validation_metric(trainer.ema_model(), val_items, trainer.schedule(), cfg);
        validated = true;
      }
      result.curve.push_back(pt);
      if (progress) progress(pt);
      if (last_in_budget && !last_in_epoch) {
        budget_spent = true;
        break;
      }
    }
    if (!budget_spent) trainer.set_epoch(epoch + 1);
    if (!validated) continue;
    const double v = result.curve.back().validation;
    if (v < best) {
      best = v;
      bad_epochs = 0;
      result.ema = trainer.ema_model();
    } else if (++bad_epochs >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  result.model = trainer.model();
  if (val_items.empty() || !std::isfinite(best)) result.ema = trainer.ema_model();
  return result;
}

TrainResult train(const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const Schedule& s,
                  const TrainConfig& cfg, const TinyDenoiserConfig& model_cfg,
                  const TrainProgress& progress) {
  Trainer trainer(TinyDenoiser(model_cfg), s, cfg);
  return train(trainer, train_set, val_set, progress);
}

}  // namespace sbse
