// SPDX-License-Identifier: Apache-2.0
#pragma once

// Frame-by-token log-posterior grids and their on-disk forms.
//
// Dense text format (`<key>.emis`):
//   # comment
//   frame_dur_s 0.02
//   vocab <blank> a b c '
//   -0.02 -4.61 -5.30 ...      one row per frame, |vocab| columns
//
// NPY sidecars (`<key>.npy`, 2-D little-endian float32/float64, C order)
// take vocab and frame duration from `emissions.meta` in the same directory:
//   frame_dur_s = 0.02
//   vocab = <blank> a b c '
//
// Column 0 is always the CTC blank.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/util/decimal.hpp"
#include "lemas/util/kvfile.hpp"

namespace lemas {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

class EmissionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-3;

  EmissionMatrix(std::size_t frames, std::vector<std::string> vocab, std::vector<double> log_probs, double frame_dur_s)
      : frames_(frames), vocab_(std::move(vocab)), log_probs_(std::move(log_probs)), frame_dur_s_(frame_dur_s) {
    if (frames_ == 0) throw DataError("emission matrix has no frames");
    if (vocab_.size() < 2) throw DataError("emission vocab needs a blank and at least one token");
    if (log_probs_.size() != frames_ * vocab_.size()) throw DataError("emission matrix size does not match T x V");
    if (!(frame_dur_s_ > 0.0) || !std::isfinite(frame_dur_s_)) throw DataError("frame duration must be positive");
    for (std::size_t v = 0; v < vocab_.size(); ++v)
      if (!index_.emplace(vocab_[v], static_cast<int>(v)).second) throw DataError("duplicate vocab entry \"" + vocab_[v] + "\"");
    for (std::size_t t = 0; t < frames_; ++t) {
      for (double x : row(t))
        if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) throw DataError("non-finite log-probability");
      const double lse = log_sum_exp(row(t));
      if (!(std::fabs(lse) <= kRowTolerance))
        throw DataError("frame " + std::to_string(t) + " is not a log-distribution (logsumexp " + std::to_string(lse) + ")");
    }
  }

  /// Row-wise log-softmax of arbitrary scores.
  static EmissionMatrix from_logits(std::size_t frames, std::vector<std::string> vocab, std::vector<double> logits,
                                    double frame_dur_s) {
    const std::size_t v = vocab.size();
    if (v == 0 || logits.size() != frames * v) throw DataError("logit matrix size does not match T x V");
    for (std::size_t t = 0; t < frames; ++t) {
      std::span<double> r(logits.data() + t * v, v);
      const double lse = log_sum_exp(r);
      for (double& x : r) x -= lse;
    }
    return EmissionMatrix(frames, std::move(vocab), std::move(logits), frame_dur_s);
  }

  std::size_t frames() const noexcept { return frames_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  double frame_dur_s() const noexcept { return frame_dur_s_; }
  double duration_s() const noexcept { return static_cast<double>(frames_) * frame_dur_s_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const std::vector<double>& data() const noexcept { return log_probs_; }

  double at(std::size_t t, std::size_t v) const { return log_probs_[t * vocab_.size() + v]; }

  std::span<const double> row(std::size_t t) const {
    return {log_probs_.data() + t * vocab_.size(), vocab_.size()};
  }

  std::optional<int> index_of(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::size_t frames_;
  std::vector<std::string> vocab_;
  std::vector<double> log_probs_;
  double frame_dur_s_;
  std::unordered_map<std::string, int> index_;
};

// ---- dense text

inline EmissionMatrix parse_emission_text(std::istream& in, const std::string& origin) {
  std::optional<double> frame_dur;
  std::vector<std::string> vocab;
  std::vector<double> values;
  std::size_t frames = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto toks = split_ws(t);
    if (toks[0] == "frame_dur_s") {
      if (toks.size() != 2) throw DataError(origin + ":" + std::to_string(line_no) + ": expected frame_dur_s <seconds>");
      frame_dur = parse_double(toks[1], origin + ": frame_dur_s");
      continue;
    }
    if (toks[0] == "vocab") {
      vocab.assign(toks.begin() + 1, toks.end());
      continue;
    }
    if (vocab.empty()) throw DataError(origin + ":" + std::to_string(line_no) + ": data row before vocab header");
    if (toks.size() != vocab.size())
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected " + std::to_string(vocab.size()) + " columns");
    for (const auto& tok : toks) {
      if (tok == "-inf")
        values.push_back(kNegInf);
      else
        values.push_back(parse_double(tok, origin + ":" + std::to_string(line_no)));
    }
    ++frames;
  }
  if (!frame_dur) throw DataError(origin + ": missing frame_dur_s header");
  return EmissionMatrix(frames, std::move(vocab), std::move(values), *frame_dur);
}

inline EmissionMatrix read_emission_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open emission file " + path.string());
  return parse_emission_text(in, path.string());
}

inline void write_emission_text(const EmissionMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create emission file " + path.string());
  out << "frame_dur_s " << fixed(m.frame_dur_s(), 6) << "\nvocab";
  for (const auto& v : m.vocab()) out << ' ' << v;
  out << '\n';
  char buf[32];
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t v = 0; v < m.vocab_size(); ++v) {
      const double x = m.at(t, v);
      if (x == kNegInf)
        out << (v ? " " : "") << "-inf";
      else {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << (v ? " " : "") << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failure in " + path.string());
}

// ---- NPY

struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

inline NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "\x93NUMPY", 6) != 0) throw DataError(path.string() + ": not an NPY file");
  const int major = static_cast<unsigned char>(magic[6]);
  uint32_t header_len = 0;
  if (major == 1) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    header_len = b[0] | (b[1] << 8);
  } else {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    header_len = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) throw DataError(path.string() + ": truncated NPY header");

  auto value_of = [&](const std::string& key) {
    const auto k = header.find("'" + key + "'");
    if (k == std::string::npos) throw DataError(path.string() + ": NPY header lacks " + key);
    const auto colon = header.find(':', k);
    return std::string(trim(header.substr(colon + 1)));
  };
  const std::string descr = value_of("descr");
  std::size_t width = 0;
  if (descr.rfind("'<f4'", 0) == 0)
    width = 4;
  else if (descr.rfind("'<f8'", 0) == 0)
    width = 8;
  else
    throw DataError(path.string() + ": unsupported NPY dtype " + descr.substr(0, 6));
  if (value_of("fortran_order").rfind("False", 0) != 0) throw DataError(path.string() + ": Fortran-order NPY unsupported");
  const std::string shape_text = value_of("shape");
  NpyArray arr;
  {
    const auto open = shape_text.find('(');
    const auto close = shape_text.find(')');
    std::string inner = shape_text.substr(open + 1, close - open - 1);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto t = trim(item);
      if (!t.empty()) arr.shape.push_back(static_cast<std::size_t>(parse_int(t, path.string() + ": shape")));
    }
  }
  std::size_t count = 1;
  for (auto d : arr.shape) count *= d;
  arr.data.resize(count);
  if (width == 8) {
    in.read(reinterpret_cast<char*>(arr.data.data()), static_cast<std::streamsize>(count * 8));
  } else {
    std::vector<float> tmp(count);
    in.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(count * 4));
    for (std::size_t i = 0; i < count; ++i) arr.data[i] = tmp[i];
  }
  if (!in) throw DataError(path.string() + ": truncated NPY payload");
  return arr;
}

inline void write_npy(const std::filesystem::path& path, std::size_t rows, std::size_t cols, std::span<const double> data) {
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + std::to_string(rows) + ", " +
                       std::to_string(cols) + "), }";
  while ((10 + header.size() + 1) % 64 != 0) header += ' ';
  header += '\n';
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write("\x93NUMPY\x01\x00", 8);
  const uint16_t len = static_cast<uint16_t>(header.size());
  const unsigned char lb[2] = {static_cast<unsigned char>(len & 0xFF), static_cast<unsigned char>(len >> 8)};
  out.write(reinterpret_cast<const char*>(lb), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw IoError("write failure in " + path.string());
}

/// Directory of per-utterance emission files keyed by utterance key.
class EmissionStore {
 public:
  explicit EmissionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_)) throw IoError("emission directory not found: " + dir_.string());
  }

  bool has(const std::string& key) const {
    return std::filesystem::exists(dir_ / (key + ".emis")) || std::filesystem::exists(dir_ / (key + ".npy"));
  }

  EmissionMatrix load(const std::string& key) const {
    if (const auto txt = dir_ / (key + ".emis"); std::filesystem::exists(txt)) return read_emission_text(txt);
    const auto npy = dir_ / (key + ".npy");
    if (!std::filesystem::exists(npy)) throw IoError("no emissions for key \"" + key + "\"");
    const auto meta = KeyValueFile::load((dir_ / "emissions.meta").string());
    auto arr = read_npy(npy);
    if (arr.shape.size() != 2) throw DataError(npy.string() + ": expected a 2-D array");
    return EmissionMatrix(arr.shape[0], split_ws(meta.require("vocab")), std::move(arr.data),
                          parse_double(meta.require("frame_dur_s"), "emissions.meta: frame_dur_s"));
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace lemas
