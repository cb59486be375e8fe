// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/json_io.hpp"

#include "sbse/error.hpp"

namespace sbse {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(context + "." + key + ": " + e.what());
  }
}

template <typename T, typename Parse>
void read_enum(const json& j, const char* key, T& out, Parse parse, const std::string& context) {
  std::string s;
  read(j, key, s, context);
  if (!s.empty()) out = parse(s);
}

}  // namespace

void require_keys_subset(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

void to_json(json& j, const TransformConfig& c) {
  j = {{"win_size", c.win_size},         {"hop_size", c.hop_size},
       {"compression_a", c.compression_a}, {"scale_b", c.scale_b},
       {"window", "hann"},                 {"sample_rate", c.sample_rate}};
}

void from_json(const json& j, TransformConfig& c) {
  const std::string ctx = "transform";
  require_keys_subset(j, {"win_size", "hop_size", "compression_a", "scale_b", "window", "sample_rate"}, ctx);
  read(j, "win_size", c.win_size, ctx);
  read(j, "hop_size", c.hop_size, ctx);
  read(j, "compression_a", c.compression_a, ctx);
  read(j, "scale_b", c.scale_b, ctx);
  read(j, "sample_rate", c.sample_rate, ctx);
  std::string window = "hann";
  read(j, "window", window, ctx);
  if (window != "hann") throw ConfigError("transform.window: only 'hann' is supported");
  c.validate();
}

void to_json(json& j, const TrainConfig& c) {
  j = {{"lambda_aux", c.lambda_aux},
       {"aux_kind", to_string(c.aux_kind)},
       {"snr_max_db", c.snr_max_db},
       {"lr", c.lr},
       {"batch_size", c.batch_size},
       {"ema_decay", c.ema_decay},
       {"max_epochs", c.max_epochs},
       {"patience", c.patience},
       {"max_steps", c.max_steps},
       {"segment_frames", c.segment_frames},
       {"validation", c.validation == ValidationMetric::kLoss ? "loss" : "si_sdr"},
       {"seed", c.seed}};
}

void from_json(const json& j, TrainConfig& c) {
  const std::string ctx = "train";
  require_keys_subset(j,
                      {"lambda_aux", "aux_kind", "snr_max_db", "lr", "batch_size", "ema_decay",
                       "max_epochs", "patience", "max_steps", "segment_frames", "validation", "seed"},
                      ctx);
  read(j, "lambda_aux", c.lambda_aux, ctx);
  read_enum(j, "aux_kind", c.aux_kind, aux_loss_kind_from_string, ctx);
  read(j, "snr_max_db", c.snr_max_db, ctx);
  read(j, "lr", c.lr, ctx);
  read(j, "batch_size", c.batch_size, ctx);
  read(j, "ema_decay", c.ema_decay, ctx);
  read(j, "max_epochs", c.max_epochs, ctx);
  read(j, "patience", c.patience, ctx);
  read(j, "max_steps", c.max_steps, ctx);
  read(j, "segment_frames", c.segment_frames, ctx);
  read_enum(j, "validation", c.validation,
            [](const std::string& s) {
              if (s == "loss") return ValidationMetric::kLoss;
              if (s == "si_sdr") return ValidationMetric::kSISDR;
              throw ConfigError("train.validation: expected loss or si_sdr, got '" + s + "'");
            },
            ctx);
  read(j, "seed", c.seed, ctx);
  c.validate();
}

void to_json(json& j, const TinyDenoiserConfig& c) {
  j = {{"hidden", c.hidden}, {"time_features", c.time_features}, {"init_seed", c.init_seed}};
}

void from_json(const json& j, TinyDenoiserConfig& c) {
  const std::string ctx = "model";
  require_keys_subset(j, {"hidden", "time_features", "init_seed"}, ctx);
  read(j, "hidden", c.hidden, ctx);
  read(j, "time_features", c.time_features, ctx);
  read(j, "init_seed", c.init_seed, ctx);
  c.validate();
}

void to_json(json& j, const SamplerConfig& c) {
  j = {{"kind", to_string(c.kind)}, {"n_steps", c.n_steps}, {"t_min", c.t_min}, {"seed", c.seed}};
}

void from_json(const json& j, SamplerConfig& c) {
  const std::string ctx = "sampler";
  require_keys_subset(j, {"kind", "n_steps", "t_min", "seed"}, ctx);
  read_enum(j, "kind", c.kind, sampler_kind_from_string, ctx);
  read(j, "n_steps", c.n_steps, ctx);
  read(j, "t_min", c.t_min, ctx);
  read(j, "seed", c.seed, ctx);
  if (c.n_steps < 1) throw ConfigError("sampler.n_steps must be >= 1");
  if (!(c.t_min > 0.0)) throw ConfigError("sampler.t_min must be positive");
}

void to_json(json& j, const Interval& c) { j = json::array({c.lo, c.hi}); }

void from_json(const json& j, Interval& c) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("interval: expected [lo, hi]");
  c.lo = j[0].get<double>();
  c.hi = j[1].get<double>();
}

void to_json(json& j, const DatasetSpec& c) {
  j = {{"task", to_string(c.task)},
       {"n_examples", c.n_examples},
       {"duration_s", c.duration_s},
       {"snr_range_db", c.snr_range_db},
       {"t60_range_s", c.t60_range_s},
       {"clean_kind", to_string(c.clean_kind)},
       {"noise_kind", to_string(c.noise_kind)},
       {"master_seed", c.master_seed},
       {"sample_rate", c.sample_rate}};
  if (c.clean_dir) j["clean_dir"] = c.clean_dir->string();
  if (c.noise_dir) j["noise_dir"] = c.noise_dir->string();
}

void from_json(const json& j, DatasetSpec& c) {
  const std::string ctx = "dataset";
  require_keys_subset(j,
                      {"task", "n_examples", "duration_s", "snr_range_db", "t60_range_s",
                       "clean_kind", "noise_kind", "master_seed", "sample_rate", "clean_dir",
                       "noise_dir"},
                      ctx);
  read_enum(j, "task", c.task, task_from_string, ctx);
  read(j, "n_examples", c.n_examples, ctx);
  read(j, "duration_s", c.duration_s, ctx);
  if (j.contains("snr_range_db")) c.snr_range_db = j.at("snr_range_db").get<Interval>();
  if (j.contains("t60_range_s")) c.t60_range_s = j.at("t60_range_s").get<Interval>();
  read_enum(j, "clean_kind", c.clean_kind, clean_kind_from_string, ctx);
  read_enum(j, "noise_kind", c.noise_kind, noise_kind_from_string, ctx);
  read(j, "master_seed", c.master_seed, ctx);
  read(j, "sample_rate", c.sample_rate, ctx);
  std::string dir;
  read(j, "clean_dir", dir, ctx);
  if (!dir.empty()) c.clean_dir = dir;
  dir.clear();
  read(j, "noise_dir", dir, ctx);
  if (!dir.empty()) c.noise_dir = dir;
  c.validate();
}

json schedule_to_json(const Schedule& s) {
  json j = {{"name", s.name()}, {"T", s.T()}, {"t_min", s.t_min()}};
  switch (s.kind()) {
    case ScheduleKind::kSBVE: j["c"] = s.sbve_params().c; j["k"] = s.sbve_params().k; break;
    case ScheduleKind::kSBVP:
      j["beta0"] = s.sbvp_params().beta0;
      j["beta1"] = s.sbvp_params().beta1;
      j["c"] = s.sbvp_params().c;
      break;
    case ScheduleKind::kOUVE:
      j["gamma"] = s.ouve_params().gamma;
      j["c"] = s.ouve_params().c;
      j["k"] = s.ouve_params().k;
      break;
  }
  return j;
}

Schedule schedule_from_json(const json& j) {
  const std::string ctx = "schedule";
  if (!j.is_object() || !j.contains("name")) throw ConfigError("schedule: missing 'name'");
  std::string name;
  read(j, "name", name, ctx);
  double T = 1.0, t_min = 1e-4;
  read(j, "T", T, ctx);
  read(j, "t_min", t_min, ctx);
  if (name == "sbve") {
    require_keys_subset(j, {"name", "T", "t_min", "c", "k"}, ctx);
    SbveParams p;
    read(j, "c", p.c, ctx);
    read(j, "k", p.k, ctx);
    return Schedule::sb_ve(p, T, t_min);
  }
  if (name == "sbvp") {
    require_keys_subset(j, {"name", "T", "t_min", "beta0", "beta1", "c"}, ctx);
    SbvpParams p;
    read(j, "beta0", p.beta0, ctx);
    read(j, "beta1", p.beta1, ctx);
    read(j, "c", p.c, ctx);
    return Schedule::sb_vp(p, T, t_min);
  }
  if (name == "ouve") {
    require_keys_subset(j, {"name", "T", "t_min", "gamma", "c", "k", "sigma_min", "sigma_max", "preset"},
                        ctx);
    OuveParams p;
    read(j, "gamma", p.gamma, ctx);
    if (j.contains("sigma_min") || j.contains("sigma_max")) {
      if (j.contains("c") || j.contains("k"))
        throw ConfigError("schedule: give either (c, k) or (sigma_min, sigma_max), not both");
      double sigma_min = 0.0, sigma_max = 0.0;
      read(j, "sigma_min", sigma_min, ctx);
      read(j, "sigma_max", sigma_max, ctx);
      p = OuveParams::from_sigma_range(p.gamma, sigma_min, sigma_max);
    } else {
      read(j, "c", p.c, ctx);
      read(j, "k", p.k, ctx);
    }
    const Schedule s = Schedule::ouve(p, T, t_min);
    if (j.contains("preset")) {
      std::string preset;
      read(j, "preset", preset, ctx);
      if (preset != "figure") throw ConfigError("schedule: unknown preset '" + preset + "'");
      check_ouve_figure_preset(s);
    }
    return s;
  }
  throw ConfigError("unknown schedule '" + name + "' (expected sbve, sbvp or ouve)");
}

}  // namespace sbse
