// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

#include "sbse/checkpoint.hpp"
#include "sbse/error.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/train.hpp"
#include "test_util.hpp"

namespace sbse {
namespace {

using testing::random_signal;
using testing::random_spec;

TinyDenoiser random_model(TinyDenoiserConfig cfg, std::uint64_t seed, double scale = 0.3) {
  TinyDenoiser base(cfg);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> p(base.num_parameters());
  for (double& v : p) v = n(gen);
  return TinyDenoiser(cfg, p);
}

// Plain per-column MLP over features(); independent of the folded forward.
ComplexSpectrogram naive_forward(const TinyDenoiser& m, const ComplexSpectrogram& x_t,
                                 const ComplexSpectrogram& y, double t) {
  const Eigen::MatrixXd X = m.features(x_t, y, t);
  std::vector<int> widths = m.config().hidden;
  widths.push_back(4);
  const std::span<const double> p = m.parameters();
  ComplexSpectrogram out = x_t.zeros_like();
  for (Eigen::Index col = 0; col < X.cols(); ++col) {
    std::vector<double> a(X.col(col).data(), X.col(col).data() + X.rows());
    std::size_t off = 0;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      const int in = static_cast<int>(a.size()), out_dim = widths[l];
      std::vector<double> z(out_dim, 0.0);
      for (int o = 0; o < out_dim; ++o) {
        for (int i = 0; i < in; ++i) z[o] += p[off + static_cast<std::size_t>(i) * out_dim + o] * a[i];
        z[o] += p[off + static_cast<std::size_t>(in) * out_dim + o];
      }
      off += static_cast<std::size_t>(in) * out_dim + out_dim;
      if (l + 1 < widths.size())
        for (double& v : z) v = v / (1.0 + std::exp(-v));
      a = z;
    }
    const std::size_t k = static_cast<std::size_t>(col);
    out[k] = cplx(a[0], a[1]) * y[k] + cplx(a[2], a[3]) * x_t[k];
  }
  return out;
}

TEST(TinyDenoiser, ParameterCountAndLayout) {
  const TinyDenoiser m(TinyDenoiserConfig{});
  EXPECT_EQ(m.config().input_dim(), 71);
  EXPECT_EQ(m.num_parameters(), 71u * 64 + 64 + 64u * 64 + 64 + 64u * 4 + 4);
  EXPECT_LT(m.num_parameters(), 100000u);
}

TEST(TinyDenoiser, StartsNearIdentityOnState) {
  const TinyDenoiser m(TinyDenoiserConfig{});
  const ComplexSpectrogram x = random_spec(20, 6, 1, 0.2), y = random_spec(20, 6, 2, 0.2);
  const ComplexSpectrogram out = m.estimate(x, y, 0.5);
  EXPECT_LT(testing::rel_error(out, x), 0.1);
}

TEST(TinyDenoiser, ForwardMatchesNaiveEvaluation) {
  TinyDenoiserConfig cfg;
  cfg.hidden = {12, 7};
  cfg.time_features = 6;
  const TinyDenoiser m = random_model(cfg, 3);
  const ComplexSpectrogram x = random_spec(7, 5, 4), y = random_spec(7, 5, 5);
  for (double t : {0.0, 0.3, 1.0}) {
    EXPECT_LT(testing::max_abs_diff(m.estimate(x, y, t), naive_forward(m, x, y, t)), 1e-12);
  }
}

TEST(TinyDenoiser, FeatureLayout) {
  TinyDenoiserConfig cfg;
  cfg.time_features = 4;
  const TinyDenoiser m(cfg);
  const ComplexSpectrogram x = random_spec(4, 3, 1), y = random_spec(4, 3, 2);
  const double t = 0.7;
  const Eigen::MatrixXd X = m.features(x, y, t);
  ASSERT_EQ(X.rows(), 36 + 18 + 4 + 1);
  ASSERT_EQ(X.cols(), 12);
  // Column of bin 0, frame 1: the (df, dm) = (0, 0) neighbour is patch slot 4,
  // and bin -1 reflects to bin 1.
  const Eigen::Index p = 1 * 4 + 0;
  EXPECT_EQ(X(16, p), x.at(0, 1).real());
  EXPECT_EQ(X(17, p), x.at(0, 1).imag());
  EXPECT_EQ(X(18, p), y.at(0, 1).real());
  EXPECT_EQ(X(19, p), y.at(0, 1).imag());
  EXPECT_EQ(X(12, p), x.at(1, 1).real());
  EXPECT_EQ(X(0, p), x.at(1, 0).real());
  EXPECT_NEAR(X(36 + 8, p), std::abs(x.at(0, 1)), 1e-15);
  EXPECT_NEAR(X(36 + 9, p), std::abs(y.at(0, 1)), 1e-15);
  EXPECT_NEAR(X(54, p), std::sin(t), 1e-15);
  EXPECT_NEAR(X(55, p), std::cos(t), 1e-15);
  EXPECT_NEAR(X(56, p), std::sin(2 * t), 1e-15);
  EXPECT_NEAR(X(57, p), std::cos(2 * t), 1e-15);
  EXPECT_EQ(X(58, p), 0.0);
  EXPECT_EQ(X(58, 3), 1.0);
}

TEST(TinyDenoiser, DeterministicInitAndConfigErrors) {
  TinyDenoiserConfig a;
  a.init_seed = 5;
  const TinyDenoiser m1(a), m2(a);
  EXPECT_TRUE(std::equal(m1.parameters().begin(), m1.parameters().end(), m2.parameters().begin()));
  a.init_seed = 6;
  const TinyDenoiser m3(a);
  EXPECT_FALSE(std::equal(m1.parameters().begin(), m1.parameters().end(), m3.parameters().begin()));
  TinyDenoiserConfig bad;
  bad.hidden = {};
  EXPECT_THROW(TinyDenoiser{bad}, ConfigError);
  bad.hidden = {8};
  bad.time_features = 3;
  EXPECT_THROW(TinyDenoiser{bad}, ConfigError);
  EXPECT_THROW(TinyDenoiser(TinyDenoiserConfig{}, std::vector<double>(10)), DataError);
  const TinyDenoiser m(TinyDenoiserConfig{});
  EXPECT_THROW(m.estimate(ComplexSpectrogram(3, 3), ComplexSpectrogram(3, 2), 0.1),
               std::invalid_argument);
}

struct GradCase {
  AuxLossKind kind;
  double lambda;
};

// Central differences on randomly chosen parameters.
double worst_gradient_error(const GradCase& gc, int probes, std::uint64_t seed) {
  TinyDenoiserConfig mc;
  mc.hidden = {16, 16};
  mc.time_features = 8;
  TinyDenoiser model = random_model(mc, seed, 0.2);
  const TransformConfig tc;
  const TimeSignal clean = random_signal(1000, seed + 1, 0.3);
  const TimeSignal noisy = random_signal(1000, seed + 2, 0.5);
  TrainConfig cfg;
  cfg.aux_kind = gc.kind;
  cfg.lambda_aux = gc.lambda;
  const Schedule s = Schedule::sb_ve();
  const TrainingItem item =
      make_training_item(analyze(clean, tc), analyze(noisy, tc), 0.4,
                         random_spec(256, tc.num_frames(1000), seed + 3, std::sqrt(0.5)), cfg);
  std::vector<double> grad(model.num_parameters(), 0.0);
  loss_and_gradient(model, item, s, cfg, grad);

  std::mt19937_64 gen(seed + 4);
  std::uniform_int_distribution<std::size_t> pick(0, model.num_parameters() - 1);
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const std::size_t i = pick(gen);
    const double orig = model.parameters()[i];
    const double h = 1e-5 * std::max(1.0, std::abs(orig));
    model.parameters()[i] = orig + h;
    const double lp = loss_and_gradient(model, item, s, cfg, {}).total;
    model.parameters()[i] = orig - h;
    const double lm = loss_and_gradient(model, item, s, cfg, {}).total;
    model.parameters()[i] = orig;
    const double fd = (lp - lm) / (2 * h);
    const double err = std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    worst = std::max(worst, err);
  }
  return worst;
}

TEST(TinyDenoiser, GradientMatchesFiniteDifferences) {
  for (GradCase gc : {GradCase{AuxLossKind::kNone, 0.0}, GradCase{AuxLossKind::kL1, 1e-3},
                      GradCase{AuxLossKind::kSoftSISDR, 1e-3}}) {
    EXPECT_LT(worst_gradient_error(gc, 30, 11), 1e-4) << to_string(gc.kind);
  }
}

std::vector<TrainingExample> toy_examples(int n, std::uint64_t seed) {
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    TimeSignal clean = random_signal(4000, seed + i, 0.2);
    TimeSignal noisy = clean;
    const TimeSignal noise = random_signal(4000, seed + 1000 + i, 0.1);
    for (std::size_t k = 0; k < noisy.size(); ++k) noisy.samples[k] += noise.samples[k];
    out.push_back(make_training_example(clean, noisy, {}));
  }
  return out;
}

TrainConfig small_train_config() {
  TrainConfig cfg;
  cfg.segment_frames = 8;
  cfg.batch_size = 2;
  cfg.lr = 1e-3;
  cfg.seed = 4;
  return cfg;
}

TinyDenoiserConfig small_model() {
  TinyDenoiserConfig m;
  m.hidden = {16, 16};
  m.time_features = 4;
  return m;
}

TEST(Train, AdamFirstStepMovesByLearningRate) {
  Adam adam(2, 0.1);
  std::vector<double> p{1.0, -1.0};
  adam.step(p, std::vector<double>{3.0, -1e-3});
  EXPECT_NEAR(p[0], 0.9, 1e-9);
  EXPECT_NEAR(p[1], -0.9, 1e-5);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Train, EmaContractsTowardWeights) {
  Ema ema(std::vector<double>{0.0, 10.0}, 0.9);
  ema.update(std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(ema.weights()[0], 0.1, 1e-15);
  EXPECT_NEAR(ema.weights()[1], 9.0, 1e-15);
  for (int i = 0; i < 200; ++i) ema.update(std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(ema.weights()[0], 1.0, 1e-8);
  EXPECT_NEAR(ema.weights()[1], 0.0, 1e-8);
}

TEST(Train, ZeroLearningRateLeavesWeightsUnchanged) {
  const auto data = toy_examples(2, 1);
  TrainConfig cfg = small_train_config();
  cfg.lr = 0.0;
  Trainer tr(TinyDenoiser(small_model()), Schedule::sb_ve(), cfg);
  const std::vector<double> before(tr.model().parameters().begin(), tr.model().parameters().end());
  for (int i = 0; i < 5; ++i) tr.step(data);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(tr.model().parameters()[i], before[i]);
    EXPECT_NEAR(tr.ema_model().parameters()[i], before[i], 1e-15 * std::abs(before[i]) + 1e-300);
  }
}

TEST(Train, OverfitsSingleItem) {
  TrainConfig cfg = small_train_config();
  cfg.lr = 3e-3;
  cfg.aux_kind = AuxLossKind::kNone;
  Trainer tr(TinyDenoiser(small_model()), Schedule::sb_ve(), cfg);
  const std::vector<TrainingItem> batch{make_training_item(
      random_spec(4, 2, 1, 0.5), random_spec(4, 2, 2, 0.5), 0.5, random_spec(4, 2, 3, 0.7), cfg)};
  const double first = tr.step(batch);
  double last = first;
  for (int i = 0; i < 400; ++i) last = tr.step(batch);
  EXPECT_LT(last, 0.1 * first);
}

TEST(Train, LossDecreasesOnToyData) {
  const auto data = toy_examples(4, 3);
  TrainConfig cfg = small_train_config();
  cfg.max_steps = 150;
  cfg.max_epochs = 1000;
  cfg.patience = 1000;
  const TrainResult r = train(data, {}, Schedule::sb_ve(), cfg, small_model());
  ASSERT_EQ(r.curve.size(), 150u);
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 20; ++i) head += r.curve[i].train_loss, tail += r.curve[130 + i].train_loss;
  EXPECT_LT(tail, head);
}

TEST(Train, ReproducibleForFixedSeed) {
  const auto data = toy_examples(3, 5);
  TrainConfig cfg = small_train_config();
  cfg.max_steps = 12;
  const TrainResult a = train(data, data, Schedule::sb_vp(), cfg, small_model());
  const TrainResult b = train(data, data, Schedule::sb_vp(), cfg, small_model());
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) EXPECT_EQ(a.curve[i].train_loss, b.curve[i].train_loss);
  EXPECT_TRUE(std::equal(a.ema.parameters().begin(), a.ema.parameters().end(), b.ema.parameters().begin()));
}

TEST(Train, ValidationRunsAtEpochEnds) {
  const auto data = toy_examples(4, 6);
  TrainConfig cfg = small_train_config();
  cfg.max_epochs = 3;
  const TrainResult r = train(data, data, Schedule::sb_ve(), cfg, small_model());
  ASSERT_EQ(r.curve.size(), 6u);
  for (std::size_t i = 0; i < r.curve.size(); ++i) EXPECT_EQ(std::isnan(r.curve[i].validation), i % 2 == 0);
}

TEST(Train, EarlyStoppingWithZeroLearningRate) {
  const auto data = toy_examples(2, 6);
  TrainConfig cfg = small_train_config();
  cfg.lr = 0.0;
  cfg.max_epochs = 50;
  cfg.patience = 2;
  const TrainResult r = train(data, data, Schedule::sb_ve(), cfg, small_model());
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.curve.size(), 3u);
}

TEST(Train, ResumeContinuesBitForBit) {
  const auto data = toy_examples(3, 7);
  TrainConfig cfg = small_train_config();
  Trainer a(TinyDenoiser(small_model()), Schedule::sb_ve(), cfg);
  for (int i = 0; i < 6; ++i) a.step(data);
  const Checkpoint ck = checkpoint_from_string(checkpoint_to_string(make_checkpoint(a, {})));
  Trainer b = resume_trainer(ck);
  EXPECT_EQ(b.steps_taken(), 6);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a.step(data), b.step(data));
  EXPECT_TRUE(std::equal(a.model().parameters().begin(), a.model().parameters().end(),
                         b.model().parameters().begin()));
}

TEST(Train, NonFiniteLossAborts) {
  auto data = toy_examples(1, 8);
  TrainConfig cfg = small_train_config();
  Trainer tr(TinyDenoiser(small_model()), Schedule::sb_ve(), cfg);
  TrainingItem item = tr.draw_item(data);
  item.x[3] = {std::nan(""), 0.0};
  const std::vector<TrainingItem> batch{item};
  try {
    tr.step(batch);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.step(), 0);
  }
}

TEST(Train, ErrorsAndPeakNormalization) {
  EXPECT_THROW(train({}, {}, Schedule::sb_ve(), small_train_config(), small_model()), DataError);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.ema_decay = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  TimeSignal s;
  s.samples = {0.1, -0.4, 0.2};
  EXPECT_DOUBLE_EQ(peak_normalization_scale(s), 2.5);
  s.samples = {0.0, 0.0};
  EXPECT_EQ(peak_normalization_scale(s), 1.0);
  TimeSignal c = random_signal(300, 1), n = random_signal(301, 2);
  EXPECT_THROW(make_training_example(c, n, {}), DataError);
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto data = toy_examples(2, 9);
  Trainer tr(TinyDenoiser(small_model()), Schedule::sb_vp(), small_train_config());
  for (int i = 0; i < 3; ++i) tr.step(data);
  TransformConfig tc;
  tc.compression_a = 0.4;
  const Checkpoint ck = make_checkpoint(tr, tc);
  testing::TempDir dir("ckpt");
  save_checkpoint(dir / "c.json", ck);
  const Checkpoint back = load_checkpoint(dir / "c.json");
  EXPECT_EQ(back.weights, ck.weights);
  EXPECT_EQ(back.ema_weights, ck.ema_weights);
  EXPECT_EQ(back.model, ck.model);
  EXPECT_EQ(back.train, ck.train);
  EXPECT_EQ(back.transform, tc);
  EXPECT_EQ(back.schedule.name(), "sbvp");
  ASSERT_TRUE(back.trainer_state.has_value());
  EXPECT_EQ(back.trainer_state->adam_v, ck.trainer_state->adam_v);
  EXPECT_EQ(back.trainer_state->rng, ck.trainer_state->rng);
}

TEST(Checkpoint, DetectsCorruption) {
  Trainer tr(TinyDenoiser(small_model()), Schedule::sb_ve(), small_train_config());
  nlohmann::json j = nlohmann::json::parse(checkpoint_to_string(make_checkpoint(tr, {})));
  nlohmann::json shape = j;
  shape["weights"].erase(0);
  EXPECT_THROW(checkpoint_from_string(shape.dump()), DataError);
  nlohmann::json version = j;
  version["version"] = 99;
  EXPECT_THROW(checkpoint_from_string(version.dump()), DataError);
  EXPECT_THROW(checkpoint_from_string("{not json"), DataError);
  testing::TempDir dir("ckpt_missing");
  EXPECT_THROW(load_checkpoint(dir / "none.json"), DataError);
}

}  // namespace
}  // namespace sbse
