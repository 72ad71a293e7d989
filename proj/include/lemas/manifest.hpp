// SPDX-License-Identifier: Apache-2.0
#pragma once

// Unified utterance record, its invariants, and the JSONL manifest codec.
//
// One record per line, fields in a fixed order:
//   key, language, audio_ref, duration_s, raw_text, normalized_text,
//   romanized_tokens, words[{word, start_s, end_s, score}], avg_confidence,
//   source, then any unknown input fields in their original order.
// Times are written with 3 decimals, scores with 6.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemas/error.hpp"
#include "lemas/util/decimal.hpp"
#include "lemas/util/kvfile.hpp"

namespace lemas {

using Json = nlohmann::ordered_json;

inline constexpr int kTimeDecimals = 3;
inline constexpr int kScoreDecimals = 6;

struct WordSpan {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;
  double score = 0.0;

  bool operator==(const WordSpan&) const = default;
};

struct UtteranceRecord {
  std::string key;
  std::string language;
  std::string audio_ref;
  double duration_s = 0.0;
  std::string raw_text;
  std::string normalized_text;
  std::vector<std::string> romanized_tokens;
  std::vector<WordSpan> words;
  std::optional<double> avg_confidence;
  std::string source;
  /// Unknown input fields, preserved for round-trip.
  Json extra = Json::object();

  bool operator==(const UtteranceRecord&) const = default;
};

/// Unweighted arithmetic mean of word scores; the utterance confidence.
inline double mean_word_score(std::span<const WordSpan> words) {
  if (words.empty()) throw BadInput("cannot score an utterance with no words");
  double sum = 0.0;
  for (const auto& w : words) sum += w.score;
  return sum / static_cast<double>(words.size());
}

/// Snap times and scores to their serialized precision.
inline UtteranceRecord quantized(UtteranceRecord r) {
  r.duration_s = quantize(r.duration_s, kTimeDecimals);
  for (auto& w : r.words) {
    w.start_s = quantize(w.start_s, kTimeDecimals);
    w.end_s = quantize(w.end_s, kTimeDecimals);
    w.score = quantize(w.score, kScoreDecimals);
  }
  if (r.avg_confidence) r.avg_confidence = quantize(*r.avg_confidence, kScoreDecimals);
  return r;
}

struct Violation {
  std::string field;
  std::string reason;
};

/// First broken invariant, if any. The language whitelist is a filter
/// concern and is not checked here.
inline std::optional<Violation> validate(const UtteranceRecord& r) {
  if (r.key.empty()) return Violation{"key", "empty key"};
  if (r.language.empty()) return Violation{"language", "empty language"};
  if (!std::isfinite(r.duration_s) || r.duration_s <= 0.0) return Violation{"duration_s", "non-positive duration"};
  for (std::size_t i = 0; i < r.words.size(); ++i) {
    const auto& w = r.words[i];
    if (!std::isfinite(w.start_s) || !std::isfinite(w.end_s)) return Violation{"words", "non-finite span time"};
    if (w.start_s < 0.0) return Violation{"words", "span starts before zero"};
    if (!(w.start_s < w.end_s)) return Violation{"words", "empty or inverted span"};
    if (w.end_s > r.duration_s) return Violation{"words", "span exceeds duration"};
    if (!(w.score >= 0.0 && w.score <= 1.0)) return Violation{"words", "score out of range"};
    if (i > 0 && r.words[i - 1].end_s > w.start_s) return Violation{"words", "spans out of order"};
  }
  if (r.avg_confidence && !(*r.avg_confidence >= 0.0 && *r.avg_confidence <= 1.0))
    return Violation{"avg_confidence", "confidence out of range"};
  if (!r.words.empty()) {
    if (r.words.size() != r.romanized_tokens.size())
      return Violation{"romanized_tokens", "word/token count mismatch"};
    if (!r.avg_confidence) return Violation{"avg_confidence", "missing avg_confidence for aligned record"};
    if (std::fabs(*r.avg_confidence - mean_word_score(r.words)) > 1e-5)
      return Violation{"avg_confidence", "avg_confidence disagrees with word scores"};
  } else if (r.avg_confidence) {
    return Violation{"avg_confidence", "avg_confidence without words"};
  }
  return std::nullopt;
}

namespace detail {

inline void append_json_string(std::string& out, const std::string& s) {
  out += Json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

inline const char* const kKnownFields[] = {"key",      "language",         "audio_ref", "duration_s",     "raw_text",
                                           "normalized_text", "romanized_tokens", "words", "avg_confidence", "source"};

inline bool is_known_field(const std::string& name) {
  for (const char* f : kKnownFields)
    if (name == f) return true;
  return false;
}

}  // namespace detail

/// Serialize one (already quantized) record as a JSONL line without the newline.
inline std::string to_json_line(const UtteranceRecord& r) {
  std::string out;
  out.reserve(256 + r.raw_text.size() * 2);
  auto field = [&](const char* name) {
    if (out.size() > 1) out += ',';
    out += '"';
    out += name;
    out += "\":";
  };
  out += '{';
  field("key");
  detail::append_json_string(out, r.key);
  field("language");
  detail::append_json_string(out, r.language);
  field("audio_ref");
  detail::append_json_string(out, r.audio_ref);
  field("duration_s");
  out += fixed(r.duration_s, kTimeDecimals);
  field("raw_text");
  detail::append_json_string(out, r.raw_text);
  field("normalized_text");
  detail::append_json_string(out, r.normalized_text);
  field("romanized_tokens");
  out += '[';
  for (std::size_t i = 0; i < r.romanized_tokens.size(); ++i) {
    if (i) out += ',';
    detail::append_json_string(out, r.romanized_tokens[i]);
  }
  out += ']';
  field("words");
  out += '[';
  for (std::size_t i = 0; i < r.words.size(); ++i) {
    const auto& w = r.words[i];
    if (i) out += ',';
    out += "{\"word\":";
    detail::append_json_string(out, w.word);
    out += ",\"start_s\":" + fixed(w.start_s, kTimeDecimals);
    out += ",\"end_s\":" + fixed(w.end_s, kTimeDecimals);
    out += ",\"score\":" + fixed(w.score, kScoreDecimals);
    out += '}';
  }
  out += ']';
  field("avg_confidence");
  out += r.avg_confidence ? fixed(*r.avg_confidence, kScoreDecimals) : std::string("null");
  field("source");
  detail::append_json_string(out, r.source);
  if (r.extra.is_object()) {
    for (const auto& [name, value] : r.extra.items()) {
      if (detail::is_known_field(name)) continue;
      out += ',';
      detail::append_json_string(out, name);
      out += ':';
      out += value.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    }
  }
  out += '}';
  return out;
}

/// Parse one manifest line. `line_no` is 1-based and only used in errors.
inline UtteranceRecord from_json_line(const std::string& line, std::size_t line_no) {
  Json obj;
  try {
    obj = Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(line_no, "<line>", std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError(line_no, "<line>", "expected a JSON object");

  auto require = [&](const char* name) -> const Json& {
    const auto it = obj.find(name);
    if (it == obj.end()) throw SchemaError(line_no, name, "missing field");
    return *it;
  };
  auto as_string = [&](const Json& v, const char* name) {
    if (!v.is_string()) throw SchemaError(line_no, name, "expected a string");
    return v.get<std::string>();
  };
  auto as_number = [&](const Json& v, const char* name) {
    if (!v.is_number()) throw SchemaError(line_no, name, "expected a number");
    return v.get<double>();
  };
  auto optional_string = [&](const char* name) {
    const auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) return std::string();
    return as_string(*it, name);
  };

  UtteranceRecord r;
  r.key = as_string(require("key"), "key");
  r.language = as_string(require("language"), "language");
  r.audio_ref = as_string(require("audio_ref"), "audio_ref");
  r.duration_s = as_number(require("duration_s"), "duration_s");
  r.raw_text = as_string(require("raw_text"), "raw_text");
  r.normalized_text = optional_string("normalized_text");
  r.source = optional_string("source");

  if (const auto it = obj.find("romanized_tokens"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError(line_no, "romanized_tokens", "expected an array");
    for (const auto& t : *it) r.romanized_tokens.push_back(as_string(t, "romanized_tokens"));
  }
  if (const auto it = obj.find("words"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError(line_no, "words", "expected an array");
    for (const auto& w : *it) {
      if (!w.is_object()) throw SchemaError(line_no, "words", "expected an object");
      WordSpan span;
      auto sub = [&](const char* name) -> const Json& {
        const auto jt = w.find(name);
        if (jt == w.end()) throw SchemaError(line_no, std::string("words.") + name, "missing field");
        return *jt;
      };
      span.word = as_string(sub("word"), "words.word");
      span.start_s = as_number(sub("start_s"), "words.start_s");
      span.end_s = as_number(sub("end_s"), "words.end_s");
      span.score = as_number(sub("score"), "words.score");
      r.words.push_back(std::move(span));
    }
  }
  if (const auto it = obj.find("avg_confidence"); it != obj.end() && !it->is_null())
    r.avg_confidence = as_number(*it, "avg_confidence");

  for (const auto& [name, value] : obj.items())
    if (!detail::is_known_field(name)) r.extra[name] = value;

  if (auto v = validate(r)) throw SchemaError(line_no, v->field, v->reason + " (key \"" + r.key + "\")");
  return r;
}

/// Streaming reader; enforces key uniqueness within the file.
class ManifestReader {
 public:
  explicit ManifestReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open manifest " + path);
  }

  std::optional<UtteranceRecord> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      auto rec = from_json_line(line, line_no_);
      if (!keys_.insert(rec.key).second) throw SchemaError(line_no_, "key", "duplicate key \"" + rec.key + "\"");
      return rec;
    }
    if (in_.bad()) throw IoError("read failure in " + path_);
    return std::nullopt;
  }

  std::size_t line() const noexcept { return line_no_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::set<std::string> keys_;
};

inline std::vector<UtteranceRecord> read_manifest(const std::string& path) {
  ManifestReader reader(path);
  std::vector<UtteranceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

class ManifestWriter {
 public:
  explicit ManifestWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot create manifest " + path);
  }

  /// Quantizes, validates and appends; throws ValidationError naming the key.
  void write(const UtteranceRecord& record) {
    const auto q = quantized(record);
    if (auto v = validate(q)) throw ValidationError(q.key, v->reason);
    if (!keys_.insert(q.key).second) throw ValidationError(q.key, "duplicate key");
    std::string line;
    try {
      line = to_json_line(q);
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(q.key, "text is not valid UTF-8");
    }
    line += '\n';
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!out_) throw IoError("write failure in " + path_);
    ++count_;
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("write failure in " + path_);
    out_.close();
  }

  std::size_t count() const noexcept { return count_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::set<std::string> keys_;
  std::size_t count_ = 0;
};

inline std::size_t write_manifest(std::span<const UtteranceRecord> records, const std::string& path) {
  ManifestWriter writer(path);
  for (const auto& r : records) writer.write(r);
  writer.close();
  return writer.count();
}

// ---------------------------------------------------------------------------
// Source adapters

/// Maps one source corpus schema onto the unified record.
struct SourceAdapterSpec {
  std::string source;
  std::map<std::string, std::string> mapping;  // record field -> source field
  std::map<std::string, Json> defaults;        // record field -> value when absent

  static inline const char* const kRequired[] = {"key", "language", "audio_ref", "duration_s", "raw_text"};
  static inline const char* const kOptional[] = {"normalized_text"};

  /// Reads `source = ...`, `map.<field> = <source field>`, `default.<field> = <value>`.
  static SourceAdapterSpec from_kv(const KeyValueFile& kv) {
    SourceAdapterSpec spec;
    spec.source = kv.require("source");
    for (const auto& [field, src] : kv.with_prefix("map.")) spec.mapping[field] = src;
    for (const auto& [field, value] : kv.with_prefix("default.")) {
      if (field == "duration_s")
        spec.defaults[field] = parse_double(value, kv.origin() + ": default.duration_s");
      else
        spec.defaults[field] = value;
    }
    return spec;
  }

  static SourceAdapterSpec load(const std::string& path) { return from_kv(KeyValueFile::load(path)); }

  /// Throws DataError("<field> unmapped") for the first uncovered required field.
  void check() const {
    for (const char* f : kRequired)
      if (!mapping.count(f) && !defaults.count(f))
        throw DataError(std::string(f) + " unmapped");
  }
};

/// Build a canonical record from one source row. Alignment fields stay empty.
inline UtteranceRecord adapt(const Json& row, const SourceAdapterSpec& spec) {
  if (!row.is_object()) throw DataError("source row is not an object");
  spec.check();

  auto lookup = [&](const std::string& field) -> std::optional<Json> {
    if (const auto m = spec.mapping.find(field); m != spec.mapping.end()) {
      if (const auto it = row.find(m->second); it != row.end() && !it->is_null()) return *it;
    }
    if (const auto d = spec.defaults.find(field); d != spec.defaults.end()) return d->second;
    return std::nullopt;
  };
  auto text_field = [&](const std::string& field, bool required) -> std::string {
    const auto v = lookup(field);
    if (!v) {
      if (!required) return {};
      throw DataError(field + " missing in source row (mapped to \"" + spec.mapping.at(field) + "\")");
    }
    if (v->is_string()) return v->get<std::string>();
    if (v->is_number_integer()) return std::to_string(v->get<long long>());
    throw DataError(field + ": expected a string in source row");
  };

  UtteranceRecord r;
  r.key = text_field("key", true);
  r.language = text_field("language", true);
  r.audio_ref = text_field("audio_ref", true);
  r.raw_text = text_field("raw_text", true);
  r.normalized_text = text_field("normalized_text", false);
  const auto dur = lookup("duration_s");
  if (!dur) throw DataError("duration_s missing in source row");
  if (dur->is_number())
    r.duration_s = dur->get<double>();
  else if (dur->is_string())
    r.duration_s = parse_double(dur->get<std::string>(), "duration_s");
  else
    throw DataError("duration_s: expected a number in source row");
  r.source = spec.source;
  return r;
}

}  // namespace lemas
