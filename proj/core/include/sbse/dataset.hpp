// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sbse/synth.hpp"

namespace sbse {

/// Example `index` of the dataset; a pure function of (spec, index). Pairs
/// whose peak would reach 0.99 are rescaled jointly, which leaves the SNR
/// and the task difficulty unchanged.
PairedExample generate_example(const DatasetSpec& spec, std::size_t index);

/// All examples, generated over `jobs` worker threads.
std::vector<PairedExample> generate_dataset(const DatasetSpec& spec, int jobs = 1);

struct ManifestEntry {
  std::string id;
  std::string clean_path;     // relative to the dataset directory
  std::string degraded_path;  // relative to the dataset directory
  ExampleMeta meta;

  bool operator==(const ManifestEntry&) const = default;
};

std::string example_id(std::size_t index);
std::string to_json_line(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json_line(const std::string& line);

inline constexpr const char* kManifestName = "manifest.jsonl";
inline constexpr const char* kDatasetSpecName = "dataset_spec.json";

using WarningSink = std::function<void(const std::string&)>;

/// Writes clean/<id>.wav and degraded/<id>.wav (float32), the JSON-lines
/// manifest and the effective spec under `dir`. Rerunning with the same spec
/// reproduces every file byte for byte.
std::vector<ManifestEntry> write_dataset(const DatasetSpec& spec, const std::filesystem::path& dir,
                                         int jobs = 1, const WarningSink& warn = {});

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);
PairedExample load_example(const std::filesystem::path& dir, const ManifestEntry& entry);

struct LoadedDataset {
  std::vector<ManifestEntry> entries;
  std::vector<PairedExample> examples;
};
LoadedDataset load_dataset(const std::filesystem::path& dir);

/// Sorted *.wav files of a directory; throws DataError when there are none.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

}  // namespace sbse
