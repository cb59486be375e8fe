// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one line per criterion, exit status 1 when any gated
// criterion fails. Criterion 12 is reported but never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "sbse/bridge.hpp"
#include "sbse/dataset.hpp"
#include "sbse/denoiser.hpp"
#include "sbse/enhance.hpp"
#include "sbse/loss.hpp"
#include "sbse/metrics.hpp"
#include "sbse/schedule.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/train.hpp"
#include "sbse/transform.hpp"
#include "test_util.hpp"

namespace {

using namespace sbse;
using sbse::testing::random_signal;
using sbse::testing::random_spec;
using sbse::testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_norm_error(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

Outcome c01_boundaries() {
  double worst = 0.0;
  for (const Schedule& s : {Schedule::sb_ve(), Schedule::sb_vp()}) {
    worst = std::max(worst, std::abs(s.weights(0.0).w_x - 1.0));
    worst = std::max(worst, std::abs(s.weights(s.T()).w_y - 1.0));
    worst = std::max(worst, std::abs(s.weights(0.0).w_y));
    worst = std::max(worst, std::abs(s.weights(s.T()).w_x));
    worst = std::max(worst, std::abs(s.marginal_variance(0.0)));
    worst = std::max(worst, std::abs(s.marginal_variance(s.T())));
  }
  return {worst <= 1e-12, "max boundary deviation " + fmt("%.2e", worst)};
}

double grid_max_variance(const Schedule& s, int points) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) best = std::max(best, s.marginal_variance(s.T() * i / points));
  return best;
}

Outcome c02_max_variance() {
  const Schedule ve = Schedule::sb_ve(), vp = Schedule::sb_vp();
  const double ve_max = grid_max_variance(ve, 10000);
  const double vp_max = grid_max_variance(vp, 10000);
  const double quarter = ve.sigma_T2() / 4.0;
  const bool ve_ok = std::abs(ve_max - quarter) <= 1e-6 * quarter;
  const bool ve_claim = std::abs(ve_max - 0.3) / 0.3 < 0.005;
  const bool vp_ok = std::abs(vp_max - 0.3) / 0.3 < 0.05;
  return {ve_ok && ve_claim && vp_ok, "SB-VE max " + fmt("%.6f", ve_max) + " (sigma_T^2/4 " +
                                          fmt("%.6f", quarter) + "), SB-VP max " +
                                          fmt("%.6f", vp_max)};
}

Outcome c03_oracle_exactness() {
  double worst = 0.0, spread = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ComplexSpectrogram x = random_spec(64, 24, 100 + k, 0.4);
    const ComplexSpectrogram y = random_spec(64, 24, 200 + k, 0.6);
    const OracleDenoiser oracle(x);
    for (const Schedule& s : {Schedule::sb_ve(), Schedule::sb_vp()}) {
      for (SamplerKind kind : {SamplerKind::kSBSDE, SamplerKind::kSBODE}) {
        std::vector<double> errs;
        for (int n : {1, 5, 50}) {
          const SamplerConfig cfg{kind, n, 1e-4, static_cast<std::uint64_t>(k)};
          errs.push_back(rel_norm_error(run_reverse(y, oracle, cfg, s), x));
        }
        for (double e : errs) worst = std::max(worst, e);
        spread = std::max(spread, *std::max_element(errs.begin(), errs.end()) -
                                      *std::min_element(errs.begin(), errs.end()));
      }
    }
  }
  return {worst < 1e-6 && spread < 1e-6,
          "max relative error " + fmt("%.2e", worst) + ", spread over step counts " +
              fmt("%.2e", spread)};
}

Outcome c04_ode_mean_path() {
  double worst = 0.0;
  for (const Schedule& s : {Schedule::sb_ve(), Schedule::sb_vp()}) {
    const ComplexSpectrogram x = random_spec(32, 16, 7, 0.4), y = random_spec(32, 16, 8, 0.6);
    const OracleDenoiser oracle(x);
    const SamplerConfig cfg{SamplerKind::kSBODE, 50, 1e-4, 0};
    run_reverse(y, oracle, cfg, s, [&](const StepRecord& r) {
      const MeanWeights w = s.weights(r.t);
      ComplexSpectrogram mu = x;
      for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = w.w_x * x[i] + w.w_y * y[i];
      worst = std::max(worst, rel_norm_error(r.state, mu));
    });
  }
  return {worst < 1e-8, "max relative deviation from the mean path " + fmt("%.2e", worst)};
}

Outcome c05_one_step_marginal() {
  double coef = 0.0, worst_z = 0.0, worst_var = 0.0;
  const int n = 100000;
  const cplx x{0.7, -0.2}, y{-0.4, 1.1};
  for (const Schedule& s : {Schedule::sb_ve(), Schedule::sb_vp()}) {
    for (double t : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const SdeCoefficients c = sde_coefficients(s, s.T(), t);
      const MeanWeights w = s.weights(t);
      coef = std::max({coef, std::abs(c.state - w.w_y), std::abs(c.estimate - w.w_x),
                       std::abs(c.noise * c.noise - s.marginal_variance(t))});
    }
    const double t = 0.5;
    ComplexSpectrogram xs(1, n), ys(1, n);
    for (int i = 0; i < n; ++i) xs[i] = x, ys[i] = y;
    ComplexGaussianSampler rng(2024);
    const ProcessState out = sde_step({ys, s.T()}, xs, t, s, rng);
    // Real parts are the scalar draws.
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += out.coeffs[i].real();
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (out.coeffs[i].real() - mean) * (out.coeffs[i].real() - mean);
    var /= n - 1;
    const MeanWeights w = s.weights(t);
    const double mu = w.w_x * x.real() + w.w_y * y.real();
    const double v = s.marginal_variance(t) / 2.0;
    worst_z = std::max(worst_z, std::abs(mean - mu) / std::sqrt(v / n));
    worst_var = std::max(worst_var, std::abs(var / v - 1.0));
  }
  return {coef <= 1e-12 && worst_z < 3.0 && worst_var < 0.05,
          "coefficient deviation " + fmt("%.2e", coef) + ", mean |z| " + fmt("%.2f", worst_z) +
              ", variance rel. error " + fmt("%.4f", worst_var)};
}

Outcome c06_forward_marginals() {
  TempDir dir("acc_sim");
  cli::GlobalOptions g;
  g.out_dir = dir.path();
  const int code = cli::cmd_simulate(g, {});
  std::ifstream f(dir / "simulate.csv");
  int rows = -1;
  for (std::string line; std::getline(f, line);) ++rows;
  return {code == cli::kExitOk, "simulate exit code " + std::to_string(code) + ", " +
                                    std::to_string(rows) + " moment checks"};
}

std::vector<TimeSignal> round_trip_signals() {
  std::vector<TimeSignal> out;
  const std::size_t n = 16000;
  for (int k = 0; k < 12; ++k) out.push_back(random_signal(n - 37 * k, 300 + k, 0.1 + 0.1 * k));
  auto make = [&](auto fn) {
    TimeSignal s;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.samples[i] = fn(static_cast<double>(i) / 16000.0, i);
    out.push_back(s);
  };
  make([](double t, std::size_t) { return 0.5 * std::sin(2 * M_PI * 440 * t); });
  make([](double t, std::size_t) { return 0.3 * std::sin(2 * M_PI * (100 + 3000 * t) * t); });
  make([](double, std::size_t i) { return i == 4000 ? 1.0 : 0.0; });
  make([](double, std::size_t) { return 0.25; });
  make([](double, std::size_t i) { return (i / 200) % 2 ? 0.4 : -0.4; });
  make([](double t, std::size_t) { return std::exp(-5 * t) * std::sin(2 * M_PI * 7000 * t); });
  make([](double, std::size_t) { return 0.0; });
  make([](double t, std::size_t i) { return 0.2 * std::sin(2 * M_PI * 150 * t) + (i % 97 == 0) * 0.5; });
  return out;
}

Outcome c07_round_trip() {
  const TransformConfig cfg;
  const bool default_cfg = cfg.win_size == 510 && cfg.hop_size == 128 && cfg.compression_a == 0.5 &&
                         cfg.scale_b == 0.33;
  double worst = 0.0;
  const std::vector<TimeSignal> signals = round_trip_signals();
  for (const TimeSignal& s : signals) {
    const TimeSignal back = synthesize(analyze(s, cfg), cfg);
    if (back.size() != s.size()) return {false, "length changed"};
    for (std::size_t i = 0; i < s.size(); ++i)
      worst = std::max(worst, std::abs(back.samples[i] - s.samples[i]));
  }
  return {default_cfg && worst < 1e-6, std::to_string(signals.size()) + " signals, max error " +
                                         fmt("%.2e", worst)};
}

Outcome c08_gradients() {
  int probes = 0;
  double worst = 0.0;
  const TransformConfig tc;
  const Schedule s = Schedule::sb_ve();
  std::uint64_t seed = 50;
  for (AuxLossKind kind : {AuxLossKind::kL1, AuxLossKind::kSoftSISDR}) {
    for (double lambda : {0.0, 1e-3}) {
      ++seed;
      TinyDenoiser model{TinyDenoiserConfig{}};
      // Move away from the near-identity init so every layer carries gradient.
      std::mt19937_64 gen(seed);
      std::normal_distribution<double> nd(0.0, 0.15);
      for (double& p : model.parameters()) p += nd(gen);
      TrainConfig cfg;
      cfg.aux_kind = kind;
      cfg.lambda_aux = lambda;
      const TimeSignal clean = random_signal(1500, seed + 1, 0.3);
      const TimeSignal noisy = random_signal(1500, seed + 2, 0.5);
      const TrainingItem item = make_training_item(
          analyze(clean, tc), analyze(noisy, tc), 0.35,
          random_spec(tc.num_bins(), tc.num_frames(1500), seed + 3, std::sqrt(0.5)), cfg);
      std::vector<double> grad(model.num_parameters(), 0.0);
      loss_and_gradient(model, item, s, cfg, grad);
      std::uniform_int_distribution<std::size_t> pick(0, model.num_parameters() - 1);
      for (int k = 0; k < 30; ++k, ++probes) {
        const std::size_t i = pick(gen);
        const double orig = model.parameters()[i];
        const double h = 1e-5 * std::max(1.0, std::abs(orig));
        model.parameters()[i] = orig + h;
        const double lp = loss_and_gradient(model, item, s, cfg, {}).total;
        model.parameters()[i] = orig - h;
        const double lm = loss_and_gradient(model, item, s, cfg, {}).total;
        model.parameters()[i] = orig;
        const double fd = (lp - lm) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad[i]) /
                                    std::max({std::abs(fd), std::abs(grad[i]), 1e-8}));
      }
    }
  }
  return {probes >= 100 && worst < 1e-4,
          std::to_string(probes) + " probes, max relative error " + fmt("%.2e", worst)};
}

Outcome c09_score() {
  const Schedule s = Schedule::ouve();
  const ComplexSpectrogram x = random_spec(8, 4, 1), y = random_spec(8, 4, 2);
  const ComplexSpectrogram xt = random_spec(8, 4, 3, 0.3);
  double worst = 0.0;
  for (double t : {0.05, 0.3, 0.6, 1.0}) {
    const ComplexSpectrogram score = ouve_conditional_score(xt, x, y, t, s);
    const MeanWeights w = s.weights(t);
    const double var = s.marginal_variance(t);
    for (std::size_t i = 0; i < xt.size(); ++i) {
      const cplx mu = w.w_x * x[i] + w.w_y * y[i];
      auto logp = [&](cplx v) { return -std::norm(v - mu) / var - std::log(M_PI * var); };
      const double h = 1e-6 * std::sqrt(var);
      const double d_re = (logp(xt[i] + cplx{h, 0}) - logp(xt[i] - cplx{h, 0})) / (2 * h);
      const double d_im = (logp(xt[i] + cplx{0, h}) - logp(xt[i] - cplx{0, h})) / (2 * h);
      // Derivative with respect to conj(x_t).
      const cplx fd = 0.5 * cplx{d_re, d_im};
      worst = std::max(worst, std::abs(fd - score[i]) / std::max(std::abs(score[i]), 1e-3));
    }
  }
  const ComplexSpectrogram z = random_spec(8, 4, 9);
  const double sigma = std::sqrt(s.marginal_variance(0.5));
  ComplexSpectrogram minimizer = z;
  for (cplx& c : minimizer.values()) c = -c / sigma;
  const double loss = score_matching_loss(minimizer, sigma, z);
  return {worst < 1e-5 && std::abs(loss) < 1e-20,
          "score vs finite differences " + fmt("%.2e", worst) + ", loss at minimizer " +
              fmt("%.1e", loss)};
}

Outcome c11_weight_shape() {
  TempDir dir("acc_dump");
  cli::GlobalOptions g;
  g.out_dir = dir.path();
  if (cli::cmd_schedule_dump(g, {}) != cli::kExitOk) return {false, "schedule-dump failed"};
  std::ifstream f(dir / "schedules.csv");
  std::string line;
  std::getline(f, line);
  double sb_dev = 0.0, ouve_wx1 = -1.0;
  int rows = 0;
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    std::string t_s, name, wx_s, wy_s;
    std::getline(ls, t_s, ',');
    std::getline(ls, name, ',');
    std::getline(ls, wx_s, ',');
    std::getline(ls, wy_s, ',');
    const double t = std::stod(t_s), wx = std::stod(wx_s), wy = std::stod(wy_s);
    ++rows;
    if (name != "ouve" && t == 0.0) sb_dev = std::max({sb_dev, std::abs(wx - 1.0), std::abs(wy)});
    if (name != "ouve" && t == 1.0) sb_dev = std::max({sb_dev, std::abs(wx), std::abs(wy - 1.0)});
    if (name == "ouve" && t == 1.0) ouve_wx1 = wx;
  }
  const double expected = std::exp(-1.5);
  return {rows == 303 && sb_dev <= 1e-12 && std::abs(ouve_wx1 - expected) < 1e-9,
          "SB endpoint deviation " + fmt("%.1e", sb_dev) + ", OUVE w_x(1) = " +
              fmt("%.6f", ouve_wx1)};
}

struct ToyRun {
  std::map<std::pair<SamplerKind, int>, double> improvement;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

// Shared by criteria 10 and 12.
ToyRun toy_run() {
  using clock = std::chrono::steady_clock;
  DatasetSpec train_spec;
  train_spec.n_examples = 64;
  train_spec.master_seed = 1;
  DatasetSpec test_spec = train_spec;
  test_spec.n_examples = 16;
  test_spec.master_seed = 2;
  const std::vector<PairedExample> train_set = generate_dataset(train_spec);
  const std::vector<PairedExample> test_set = generate_dataset(test_spec);
  const TransformConfig tc;
  std::vector<TrainingExample> examples;
  for (const PairedExample& e : train_set)
    examples.push_back(make_training_example(e.clean, e.degraded, tc));

  // Desk-scale budget: fixed step count, faster learning rate and EMA.
  TrainConfig cfg;
  cfg.lr = 2e-3;
  cfg.ema_decay = 0.99;
  cfg.max_steps = 800;
  cfg.max_epochs = 1000000;
  cfg.patience = 1000000;
  const Schedule s = Schedule::sb_ve();
  ToyRun run;
  auto t0 = clock::now();
  const TrainResult trained = train(examples, {}, s, cfg, TinyDenoiserConfig{});
  run.train_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  for (SamplerKind kind : {SamplerKind::kSBSDE, SamplerKind::kSBODE}) {
    for (int n : {50, 5}) {
      double acc = 0.0;
      for (const PairedExample& e : test_set) {
        const SamplerConfig sc{kind, n, 1e-4, 3};
        const EnhanceResult out = enhance(e.degraded, trained.ema, sc, s, tc);
        acc += si_sdr(e.clean, out.output) - si_sdr(e.clean, e.degraded);
      }
      run.improvement[{kind, n}] = acc / static_cast<double>(test_set.size());
    }
  }
  run.eval_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return run;
}

void print(int id, const char* name, const Outcome& o, bool report_only = false) {
  const char* tag = report_only ? (o.pass ? "[PASS] (report-only)" : "[FAIL] (report-only)")
                                : (o.pass ? "[PASS]" : "[FAIL]");
  std::printf("%s %2d %s: %s\n", tag, id, name, o.detail.c_str());
  std::fflush(stdout);
}

Outcome guard(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  // --skip-training drops criteria 10 and 12 (they take several minutes).
  const bool skip_training = argc > 1 && std::string(argv[1]) == "--skip-training";
  bool all_pass = true;
  auto gate = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const Outcome o = guard(fn);
    all_pass = all_pass && o.pass;
    print(id, name, o);
  };
  gate(1, "schedule boundary identities", c01_boundaries);
  gate(2, "maximum variance", c02_max_variance);
  gate(3, "oracle exactness", c03_oracle_exactness);
  gate(4, "ODE mean-path identity", c04_ode_mean_path);
  gate(5, "one-step marginal equivalence", c05_one_step_marginal);
  gate(6, "forward-marginal statistics", c06_forward_marginals);
  gate(7, "transform round trip", c07_round_trip);
  gate(8, "gradient correctness", c08_gradients);
  gate(9, "score-target sanity", c09_score);

  if (skip_training) {
    std::printf("[SKIP] 10 end-to-end toy enhancement\n");
  } else {
    ToyRun run;
    gate(10, "end-to-end toy enhancement", [&] {
      run = toy_run();
      const double imp = run.improvement.at({SamplerKind::kSBSDE, 50});
      return Outcome{imp >= 3.0, "SDE 50-step SI-SDR improvement " + fmt("%.2f dB", imp) +
                                     " (train " + fmt("%.0f s", run.train_seconds) + ", eval " +
                                     fmt("%.0f s", run.eval_seconds) + ")"};
    });
    gate(11, "schedule weight shape", c11_weight_shape);
    const Outcome trend = guard([&] {
      if (run.improvement.empty()) return Outcome{false, "toy run unavailable"};
      bool ok = true;
      std::string detail;
      for (SamplerKind kind : {SamplerKind::kSBSDE, SamplerKind::kSBODE}) {
        const double i50 = run.improvement.at({kind, 50}), i5 = run.improvement.at({kind, 5});
        ok = ok && i50 > 0.0 && (i50 - i5) < 0.5 * i50;
        if (!detail.empty()) detail += "; ";
        detail += to_string(kind) + " 50 steps " + fmt("%.2f dB", i50) + ", 5 steps " +
                  fmt("%.2f dB", i5);
      }
      return Outcome{ok, detail};
    });
    print(12, "step-count robustness trend", trend, true);
    std::printf("%s\n", all_pass ? "acceptance: all gated criteria passed"
                                 : "acceptance: FAILED");
    return all_pass ? 0 : 1;
  }
  gate(11, "schedule weight shape", c11_weight_shape);
  std::printf("[SKIP] 12 step-count robustness trend\n");
  std::printf("%s\n", all_pass ? "acceptance: all gated criteria passed" : "acceptance: FAILED");
  return all_pass ? 0 : 1;
}
