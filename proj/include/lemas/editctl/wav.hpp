// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mono RIFF/WAVE I/O: 16-bit PCM and 32-bit IEEE float.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lemas/error.hpp"

namespace lemas::edit {

enum class SampleFormat { pcm16, float32 };

struct Wav {
  uint32_t sample_rate = 16000;
  SampleFormat format = SampleFormat::float32;
  std::vector<double> samples;  // [-1, 1] nominal
};

namespace detail {

inline uint16_t rd16(const unsigned char* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }
inline uint32_t rd32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) | (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
inline void wr16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
inline void wr32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

inline Wav parse_wav(const std::string& bytes, const std::string& origin = "<memory>") {
  const auto* d = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(d, "RIFF", 4) != 0 || std::memcmp(d + 8, "WAVE", 4) != 0)
    throw DataError(origin + ": not a RIFF/WAVE file");

  Wav wav;
  bool have_fmt = false;
  uint16_t tag = 0, channels = 0, bits = 0;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const uint32_t size = detail::rd32(d + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > n) throw DataError(origin + ": truncated chunk");
    if (std::memcmp(d + pos, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(origin + ": short fmt chunk");
      tag = detail::rd16(d + body);
      channels = detail::rd16(d + body + 2);
      wav.sample_rate = detail::rd32(d + body + 4);
      bits = detail::rd16(d + body + 14);
      if (tag == 0xFFFE && size >= 26) tag = detail::rd16(d + body + 24);  // extensible: subformat GUID prefix
      have_fmt = true;
    } else if (std::memcmp(d + pos, "data", 4) == 0) {
      if (!have_fmt) throw DataError(origin + ": data before fmt");
      if (channels != 1) throw DataError(origin + ": only mono is supported");
      if (tag == 1 && bits == 16) {
        wav.format = SampleFormat::pcm16;
        wav.samples.resize(size / 2);
        for (std::size_t i = 0; i < wav.samples.size(); ++i)
          wav.samples[i] = static_cast<int16_t>(detail::rd16(d + body + 2 * i)) / 32768.0;
      } else if (tag == 3 && bits == 32) {
        wav.format = SampleFormat::float32;
        wav.samples.resize(size / 4);
        for (std::size_t i = 0; i < wav.samples.size(); ++i) {
          const uint32_t u = detail::rd32(d + body + 4 * i);
          float f;
          std::memcpy(&f, &u, 4);
          wav.samples[i] = f;
        }
      } else {
        throw DataError(origin + ": unsupported sample format (tag " + std::to_string(tag) + ", " +
                        std::to_string(bits) + " bits)");
      }
      if (wav.sample_rate == 0) throw DataError(origin + ": zero sample rate");
      return wav;
    }
    pos = body + size + (size & 1);
  }
  throw DataError(origin + ": no data chunk");
}

inline Wav read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_wav(bytes, path.string());
}

inline std::string encode_wav(const Wav& wav) {
  const bool pcm = wav.format == SampleFormat::pcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint32_t data_bytes = static_cast<uint32_t>(wav.samples.size() * (bits / 8));
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  detail::wr32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  detail::wr32(s, 16);
  detail::wr16(s, pcm ? 1 : 3);
  detail::wr16(s, 1);
  detail::wr32(s, wav.sample_rate);
  detail::wr32(s, wav.sample_rate * (bits / 8));
  detail::wr16(s, bits / 8);
  detail::wr16(s, bits);
  s += "data";
  detail::wr32(s, data_bytes);
  for (double x : wav.samples) {
    if (pcm) {
      const long v = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
      detail::wr16(s, static_cast<uint16_t>(static_cast<int16_t>(v)));
    } else {
      const float f = static_cast<float>(x);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      detail::wr32(s, u);
    }
  }
  return s;
}

inline void write_wav(const std::filesystem::path& path, const Wav& wav) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto bytes = encode_wav(wav);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lemas::edit
