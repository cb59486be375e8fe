// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sbse/error.hpp"
#include "sbse/json_io.hpp"
#include "sbse/parallel.hpp"
#include "sbse/wav.hpp"

namespace sbse {

namespace fs = std::filesystem;

namespace {

constexpr double kPeakLimit = 0.99;
constexpr double kRescaledPeak = 0.9;

// Random excerpt of a user file, looped when shorter than n samples.
TimeSignal excerpt(const fs::path& file, std::size_t n, int rate, Rng& rng) {
  const TimeSignal src = read_wav(file, rate);
  if (src.samples.empty()) throw DataError("empty WAV file " + file.string());
  TimeSignal out;
  out.sample_rate = rate;
  out.samples.resize(n);
  const std::size_t offset = src.size() > n ? rng.index(src.size() - n + 1) : 0;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = src.samples[(offset + i) % src.size()];
  return out;
}

TimeSignal clean_signal(const DatasetSpec& spec, std::size_t index, std::uint64_t seed) {
  if (!spec.clean_dir) return gen_clean(spec.clean_kind, spec.num_samples(), spec.sample_rate, seed);
  const auto files = list_wavs(*spec.clean_dir);
  Rng rng(seed);
  TimeSignal s = excerpt(files[index % files.size()], spec.num_samples(), spec.sample_rate, rng);
  double peak = 0.0;
  for (double v : s.samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw DataError("silent clean excerpt from " + files[index % files.size()].string());
  for (double& v : s.samples) v *= 0.5 / peak;
  return s;
}

TimeSignal noise_signal(const DatasetSpec& spec, std::uint64_t seed) {
  if (!spec.noise_dir) return gen_noise(spec.noise_kind, spec.num_samples(), spec.sample_rate, seed);
  const auto files = list_wavs(*spec.noise_dir);
  Rng rng(seed);
  const fs::path& file = files[rng.index(files.size())];
  return excerpt(file, spec.num_samples(), spec.sample_rate, rng);
}

void limit_peak(PairedExample& ex) {
  double peak = 0.0;
  for (double v : ex.clean.samples) peak = std::max(peak, std::abs(v));
  for (double v : ex.degraded.samples) peak = std::max(peak, std::abs(v));
  if (peak < kPeakLimit) return;
  const double g = kRescaledPeak / peak;
  for (double& v : ex.clean.samples) v *= g;
  for (double& v : ex.degraded.samples) v *= g;
}

}  // namespace

PairedExample generate_example(const DatasetSpec& spec, std::size_t index) {
  spec.validate();
  const std::uint64_t seed = example_seed(spec.master_seed, index);
  const TimeSignal clean = clean_signal(spec, index, stream_seed(seed, Stream::kClean));
  Rng params(stream_seed(seed, Stream::kParams));
  PairedExample ex;
  if (spec.task == Task::kDenoise) {
    const double snr = params.uniform(spec.snr_range_db.lo, spec.snr_range_db.hi);
    ex = mix_noise(clean, noise_signal(spec, stream_seed(seed, Stream::kNoise)), snr);
  } else {
    const double t60 = params.uniform(spec.t60_range_s.lo, spec.t60_range_s.hi);
    const TimeSignal rir = gen_rir(t60, 1.5 * t60, stream_seed(seed, Stream::kRir), spec.sample_rate);
    ex = apply_reverb(clean, rir);
    ex.meta.t60_s = t60;
  }
  ex.meta.seed = seed;
  limit_peak(ex);
  return ex;
}

std::vector<PairedExample> generate_dataset(const DatasetSpec& spec, int jobs) {
  spec.validate();
  std::vector<PairedExample> out(static_cast<std::size_t>(spec.n_examples));
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = generate_example(spec, i); });
  return out;
}

std::string example_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ex%05zu", index);
  return buf;
}

std::string to_json_line(const ManifestEntry& e) {
  nlohmann::json j;
  j["id"] = e.id;
  j["paths"] = {{"clean", e.clean_path}, {"degraded", e.degraded_path}};
  j["task"] = to_string(e.meta.task);
  if (e.meta.task == Task::kDenoise)
    j["snr_db"] = e.meta.snr_db;
  else
    j["t60_s"] = e.meta.t60_s;
  j["seed"] = e.meta.seed;
  return j.dump();
}

ManifestEntry manifest_entry_from_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.clean_path = j.at("paths").at("clean").get<std::string>();
    e.degraded_path = j.at("paths").at("degraded").get<std::string>();
    e.meta.task = task_from_string(j.at("task").get<std::string>());
    if (e.meta.task == Task::kDenoise)
      e.meta.snr_db = j.at("snr_db").get<double>();
    else
      e.meta.t60_s = j.at("t60_s").get<double>();
    e.meta.seed = j.at("seed").get<std::uint64_t>();
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw DataError(std::string("malformed manifest line: ") + err.what());
  } catch (const ConfigError& err) {
    throw DataError(std::string("malformed manifest line: ") + err.what());
  }
}

std::vector<ManifestEntry> write_dataset(const DatasetSpec& spec, const fs::path& dir, int jobs,
                                         const WarningSink& warn) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(dir / "clean", ec);
  if (!ec) fs::create_directories(dir / "degraded", ec);
  if (ec) throw DataError("cannot create dataset directory " + dir.string() + ": " + ec.message());

  std::vector<ManifestEntry> entries(static_cast<std::size_t>(spec.n_examples));
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const PairedExample ex = generate_example(spec, i);
    ManifestEntry& e = entries[i];
    e.id = example_id(i);
    e.clean_path = "clean/" + e.id + ".wav";
    e.degraded_path = "degraded/" + e.id + ".wav";
    e.meta = ex.meta;
    write_wav(dir / e.clean_path, ex.clean);
    write_wav(dir / e.degraded_path, ex.degraded);
  });
  if (warn && spec.task == Task::kDereverb)
    for (const auto& e : entries)
      if (auto w = t60_range_warning(spec, e.meta.t60_s)) warn(e.id + ": " + *w);

  std::ofstream manifest(dir / kManifestName);
  if (!manifest) throw DataError("cannot write manifest in " + dir.string());
  for (const auto& e : entries) manifest << to_json_line(e) << '\n';
  std::ofstream spec_file(dir / kDatasetSpecName);
  spec_file << nlohmann::json(spec).dump(2) << '\n';
  if (!manifest || !spec_file) throw DataError("failed writing dataset metadata in " + dir.string());
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) throw DataError("no manifest found in " + dir.string());
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(manifest_entry_from_json_line(line));
  if (out.empty()) throw DataError("empty manifest in " + dir.string());
  return out;
}

PairedExample load_example(const fs::path& dir, const ManifestEntry& entry) {
  PairedExample ex;
  ex.clean = read_wav(dir / entry.clean_path);
  ex.degraded = read_wav(dir / entry.degraded_path);
  ex.meta = entry.meta;
  ex.validate();
  return ex;
}

LoadedDataset load_dataset(const fs::path& dir) {
  LoadedDataset out;
  out.entries = read_manifest(dir);
  for (const auto& e : out.entries) out.examples.push_back(load_example(dir, e));
  return out;
}

std::vector<fs::path> list_wavs(const fs::path& dir) {
  std::error_code ec;
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(entry.path());
  }
  if (ec) throw DataError("cannot list " + dir.string() + ": " + ec.message());
  if (out.empty()) throw DataError("no WAV files in " + dir.string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sbse
