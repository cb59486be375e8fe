// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "sbse/transform.hpp"

namespace sbse {

enum class WavEncoding { kPcm16, kFloat32 };

/// Reads a mono RIFF/WAVE file with PCM16 or IEEE float32 samples at
/// `expected_rate` Hz. Throws DataError naming the offending field
/// (format, bit depth, sample rate, channel count) otherwise.
TimeSignal read_wav(const std::filesystem::path& path, int expected_rate = 16000);

/// PCM16 output rounds to the nearest step and saturates at full scale.
void write_wav(const std::filesystem::path& path, const TimeSignal& signal,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace sbse
