// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <fstream>

#include "sbse/error.hpp"
#include "sbse/json_io.hpp"

namespace sbse::cli {

using nlohmann::json;

void SimulateConfig::validate() const {
  if (toy_dim < 1) throw ConfigError("simulate: toy_dim must be >= 1");
  if (trajectories < 2) throw ConfigError("simulate: trajectories must be >= 2");
  if (schedules.empty()) throw ConfigError("simulate: no schedules selected");
  if (times.empty()) throw ConfigError("simulate: no times selected");
  if (!(variance_scale > 0.0)) throw ConfigError("simulate: variance scale must be positive");
}

void RunConfig::apply_global_seed() {
  if (!seed) return;
  dataset.master_seed = *seed;
  train.seed = *seed;
  sampler.seed = *seed;
  model.init_seed = *seed;
}

Schedule RunConfig::make_schedule() const { return schedule_from_json(schedule); }

RunConfig config_from_json(const json& j) {
  require_keys_subset(j,
                      {"schema_version", "seed", "dataset", "transform", "schedule", "model", "train",
                       "sampler", "simulate"},
                      "config");
  if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
  if (j.at("schema_version") != kConfigSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + j.at("schema_version").dump() +
                      " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  RunConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<DatasetSpec>();
    if (j.contains("transform")) c.transform = j.at("transform").get<TransformConfig>();
    if (j.contains("schedule")) {
      c.schedule = j.at("schedule");
      (void)c.make_schedule();
    }
    if (j.contains("model")) c.model = j.at("model").get<TinyDenoiserConfig>();
    if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
    if (j.contains("sampler")) c.sampler = j.at("sampler").get<SamplerConfig>();
    if (j.contains("simulate")) {
      const json& s = j.at("simulate");
      require_keys_subset(s, {"toy_dim", "trajectories", "schedules", "times"}, "simulate");
      c.simulate.toy_dim = s.value("toy_dim", c.simulate.toy_dim);
      c.simulate.trajectories = s.value("trajectories", c.simulate.trajectories);
      c.simulate.schedules = s.value("schedules", c.simulate.schedules);
      c.simulate.times = s.value("times", c.simulate.times);
      c.simulate.validate();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& c) {
  json j = {{"schema_version", kConfigSchemaVersion},
            {"dataset", c.dataset},
            {"transform", c.transform},
            {"schedule", schedule_to_json(c.make_schedule())},
            {"model", c.model},
            {"train", c.train},
            {"sampler", c.sampler},
            {"simulate",
             {{"toy_dim", c.simulate.toy_dim},
              {"trajectories", c.simulate.trajectories},
              {"schedules", c.simulate.schedules},
              {"times", c.simulate.times}}}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

}  // namespace sbse::cli
