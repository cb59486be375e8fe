// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbse/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "sbse/error.hpp"

namespace sbse {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void store(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

TimeSignal read_wav(const std::filesystem::path& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = " in " + path.string();
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file" + where);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_size = 0;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const std::size_t size = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > buf.size()) throw DataError("truncated fmt chunk" + where);
      format = load<std::uint16_t>(buf, body);
      channels = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw DataError("truncated extensible fmt chunk" + where);
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_size = std::min(size, buf.size() - body);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw DataError("missing fmt chunk" + where);
  if (!have_data) throw DataError("missing data chunk" + where);
  if (channels != 1)
    throw DataError("unsupported channel count " + std::to_string(channels) + " (expected mono)" + where);
  if (static_cast<int>(rate) != expected_rate)
    throw DataError("unsupported sample rate " + std::to_string(rate) + " (expected " +
                    std::to_string(expected_rate) + ")" + where);

  TimeSignal out;
  out.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm) {
    if (bits != 16) throw DataError("unsupported PCM bit depth " + std::to_string(bits) + where);
    const std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] = load<std::int16_t>(buf, data_pos + 2 * i) / 32768.0;
  } else if (format == kFormatFloat) {
    if (bits != 32) throw DataError("unsupported float bit depth " + std::to_string(bits) + where);
    const std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = load<float>(buf, data_pos + 4 * i);
  } else {
    throw DataError("unsupported sample format tag " + std::to_string(format) + where);
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const TimeSignal& signal, WavEncoding encoding) {
  if (signal.sample_rate <= 0) throw DataError("write_wav: sample rate must be positive");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t block = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(signal.size() * block);

  os.write("RIFF", 4);
  store<std::uint32_t>(os, 36 + data_size);
  os.write("WAVEfmt ", 8);
  store<std::uint32_t>(os, 16);
  store<std::uint16_t>(os, pcm ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(os, 1);
  store<std::uint32_t>(os, static_cast<std::uint32_t>(signal.sample_rate));
  store<std::uint32_t>(os, static_cast<std::uint32_t>(signal.sample_rate) * block);
  store<std::uint16_t>(os, static_cast<std::uint16_t>(block));
  store<std::uint16_t>(os, bits);
  os.write("data", 4);
  store<std::uint32_t>(os, data_size);
  for (double s : signal.samples) {
    if (pcm) {
      const double q = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
      store<std::int16_t>(os, static_cast<std::int16_t>(q));
    } else {
      store<float>(os, static_cast<float>(s));
    }
  }
  if (!os) throw DataError("failed writing " + path.string());
}

}  // namespace sbse
