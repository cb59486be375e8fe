// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include <initializer_list>
#include <string>

#include "sbse/bridge.hpp"
#include "sbse/loss.hpp"
#include "sbse/schedule.hpp"
#include "sbse/synth.hpp"
#include "sbse/tiny_denoiser.hpp"
#include "sbse/transform.hpp"

// JSON conversions for the configuration types. Parsing is strict: unknown
// keys and wrongly typed values throw ConfigError naming the key. Missing
// keys keep their defaults, so partial documents act as overrides.

namespace sbse {

/// Throws ConfigError when `j` is not an object or has a key outside `allowed`.
void require_keys_subset(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& context);

void to_json(nlohmann::json& j, const TransformConfig& c);
void from_json(const nlohmann::json& j, TransformConfig& c);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

void to_json(nlohmann::json& j, const TinyDenoiserConfig& c);
void from_json(const nlohmann::json& j, TinyDenoiserConfig& c);

void to_json(nlohmann::json& j, const SamplerConfig& c);
void from_json(const nlohmann::json& j, SamplerConfig& c);

void to_json(nlohmann::json& j, const Interval& c);
void from_json(const nlohmann::json& j, Interval& c);

void to_json(nlohmann::json& j, const DatasetSpec& c);
void from_json(const nlohmann::json& j, DatasetSpec& c);

/// {"name": "sbve"|"sbvp"|"ouve", parameters..., "T", "t_min"}.
nlohmann::json schedule_to_json(const Schedule& s);
/// Missing parameters take the named schedule's defaults.
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace sbse
