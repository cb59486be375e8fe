// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sbse/error.hpp"
#include "sbse/json_io.hpp"

namespace sbse {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "sbse-checkpoint";

void require_size(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw DataError(std::string("checkpoint: ") + what + " has " + std::to_string(v.size()) +
                    " values, model layout needs " + std::to_string(n));
  for (double x : v)
    if (!std::isfinite(x)) throw DataError(std::string("checkpoint: non-finite value in ") + what);
}

}  // namespace

Checkpoint make_checkpoint(const Trainer& trainer, const TransformConfig& transform,
                           std::optional<std::vector<double>> ema_weights) {
  Checkpoint c;
  c.model = trainer.model().config();
  const auto p = trainer.model().parameters();
  c.weights.assign(p.begin(), p.end());
  c.trainer_state = trainer.state();
  c.ema_weights = ema_weights ? std::move(*ema_weights) : c.trainer_state->ema;
  c.train = trainer.config();
  c.transform = transform;
  c.schedule = trainer.schedule();
  return c;
}

Trainer resume_trainer(const Checkpoint& ckpt) {
  if (!ckpt.trainer_state) throw DataError("checkpoint has no trainer state to resume from");
  Trainer t(ckpt.raw_model(), ckpt.schedule, ckpt.train);
  t.restore(*ckpt.trainer_state);
  return t;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["model"] = ckpt.model;
  const TinyDenoiser probe(ckpt.model);
  j["num_parameters"] = probe.num_parameters();
  j["weights"] = ckpt.weights;
  j["ema_weights"] = ckpt.ema_weights;
  j["train"] = ckpt.train;
  j["transform"] = ckpt.transform;
  j["schedule"] = schedule_to_json(ckpt.schedule);
  if (ckpt.trainer_state) {
    const TrainerState& s = *ckpt.trainer_state;
    j["trainer_state"] = {{"step", s.step},     {"epoch", s.epoch}, {"adam_m", s.adam_m},
                          {"adam_v", s.adam_v}, {"ema", s.ema},     {"rng", s.rng}};
  }
  return j.dump();
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw DataError("checkpoint: missing or wrong format tag");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw DataError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint c;
    c.model = j.at("model").get<TinyDenoiserConfig>();
    c.weights = j.at("weights").get<std::vector<double>>();
    c.ema_weights = j.at("ema_weights").get<std::vector<double>>();
    c.train = j.at("train").get<TrainConfig>();
    c.transform = j.at("transform").get<TransformConfig>();
    c.schedule = schedule_from_json(j.at("schedule"));
    const std::size_t n = TinyDenoiser(c.model).num_parameters();
    if (j.at("num_parameters").get<std::size_t>() != n)
      throw DataError("checkpoint: stored parameter count does not match the model layout");
    require_size(c.weights, n, "weights");
    require_size(c.ema_weights, n, "ema_weights");
    if (j.contains("trainer_state")) {
      const json& s = j.at("trainer_state");
      TrainerState st;
      st.step = s.at("step").get<long>();
      st.epoch = s.at("epoch").get<int>();
      st.adam_m = s.at("adam_m").get<std::vector<double>>();
      st.adam_v = s.at("adam_v").get<std::vector<double>>();
      st.ema = s.at("ema").get<std::vector<double>>();
      st.rng = s.at("rng").get<std::string>();
      require_size(st.adam_m, n, "adam_m");
      require_size(st.adam_v, n, "adam_v");
      require_size(st.ema, n, "trainer ema");
      c.trainer_state = std::move(st);
    }
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: invalid configuration: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write checkpoint " + path.string());
  os << checkpoint_to_string(ckpt) << '\n';
  if (!os) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace sbse
