// SPDX-License-Identifier: Apache-2.0
#pragma once

// Evaluation-set curation and per-language corpus statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/quality.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/util/decimal.hpp"
#include "lemas/util/unicode.hpp"

namespace lemas {

/// Words per utterance. For zh this counts characters (letters), matching
/// how the published eval statistics count zh "words".
inline std::size_t word_count(const UtteranceRecord& r) {
  auto letters = [](std::string_view s) {
    std::size_t n = 0;
    for (char32_t cp : unicode::decode_utf8(s))
      if (unicode::is_letter(cp)) ++n;
    return n;
  };
  if (r.language == "zh") {
    if (r.words.empty()) return letters(rate_text(r));
    std::size_t n = 0;
    for (const auto& w : r.words) n += letters(w.word);
    return n;
  }
  if (!r.words.empty()) return r.words.size();
  std::size_t n = 0;
  for (const auto& tok : split_ws(rate_text(r)))
    if (letters(tok) > 0) ++n;
  return n;
}

struct EvalCriteria {
  double min_word_score = 0.9;  // strict
  std::size_t min_words = 5;    // strict
  double min_dur_s = 3.0;       // inclusive
  double max_dur_s = 15.0;      // inclusive
  double trailing_silence_cap_s = 0.2;
  std::size_t target_count = 500;

  void check() const {
    if (!(min_dur_s < max_dur_s)) throw InvalidArgument("eval duration window is empty");
    if (target_count == 0) throw InvalidArgument("eval target count must be positive");
    if (!(trailing_silence_cap_s >= 0.0)) throw InvalidArgument("trailing silence cap must be non-negative");
  }
};

/// Audio edit emitted by trimming: cut `key`'s audio at `end_s`.
struct TrimInstruction {
  std::string key;
  std::string audio_ref;
  double end_s = 0.0;
  double original_duration_s = 0.0;
};

struct TrimResult {
  UtteranceRecord record;
  TrimInstruction instruction;
};

/// Cap sentence-end silence: duration becomes min(duration, last end + cap).
inline TrimResult trim_trailing_silence(const UtteranceRecord& r, double cap_s = 0.2) {
  if (r.words.empty()) throw BadInput("record \"" + r.key + "\" has no words to trim against");
  TrimResult out{r, {r.key, r.audio_ref, r.duration_s, r.duration_s}};
  const double capped = quantize(r.words.back().end_s + cap_s, kTimeDecimals);
  if (capped < r.duration_s) {
    out.record.duration_s = capped;
    out.instruction.end_s = capped;
  }
  return out;
}

struct Eligibility {
  bool pass = true;
  std::string reason;
};

/// score > 0.9, words > 5, duration in [3, 15] (defaults).
inline Eligibility eligible(const UtteranceRecord& r, const EvalCriteria& c = {}) {
  if (!r.avg_confidence) return {false, "no_confidence"};
  if (!(*r.avg_confidence > c.min_word_score)) return {false, "low_score"};
  if (!(word_count(r) > c.min_words)) return {false, "too_few_words"};
  if (r.duration_s < c.min_dur_s || r.duration_s > c.max_dur_s) return {false, "duration_out_of_window"};
  return {};
}

/// The `target_count` records whose speech-rate ratio is closest to the pool
/// mean; distance ties go to the lower key. Output is sorted by key and does
/// not depend on input order.
inline std::vector<UtteranceRecord> select_eval(std::span<const UtteranceRecord> pool, const EvalCriteria& c = {}) {
  if (pool.empty()) throw InsufficientData("empty eval pool");
  for (const auto& r : pool)
    if (r.language != pool.front().language) throw InvalidArgument("eval pool mixes languages");

  std::vector<const UtteranceRecord*> by_key;
  by_key.reserve(pool.size());
  for (const auto& r : pool) by_key.push_back(&r);
  std::sort(by_key.begin(), by_key.end(), [](auto* a, auto* b) { return a->key < b->key; });

  std::vector<double> ratio(by_key.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < by_key.size(); ++i) {
    ratio[i] = char_ratio(rate_text(*by_key[i]), by_key[i]->duration_s);
    sum += ratio[i];
  }
  const double mean = sum / static_cast<double>(by_key.size());

  std::vector<std::size_t> order(by_key.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(ratio[a] - mean) < std::fabs(ratio[b] - mean);
  });
  order.resize(std::min(order.size(), c.target_count));
  std::sort(order.begin(), order.end());

  std::vector<UtteranceRecord> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(*by_key[i]);
  return out;
}

/// Deterministic ~`fraction` subset of keys for manual review.
inline std::vector<std::string> review_sample(std::vector<std::string> keys, double fraction = 0.2, uint64_t seed = 0) {
  auto hash = [seed](const std::string& k) {
    uint64_t h = 1469598103934665603ull ^ seed;
    for (unsigned char c : k) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  };
  std::sort(keys.begin(), keys.end());
  std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) { return hash(a) < hash(b); });
  keys.resize(static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(keys.size()))));
  std::sort(keys.begin(), keys.end());
  return keys;
}

// ---------------------------------------------------------------------------
// Statistics

enum class DurationUnit { hours, minutes };

inline double unit_seconds(DurationUnit u) { return u == DurationUnit::hours ? 3600.0 : 60.0; }
inline const char* unit_label(DurationUnit u) { return u == DurationUnit::hours ? "h" : "min"; }

/// Exact shard-mergeable sums.
struct StatsAccumulator {
  uint64_t utterances = 0;
  int64_t total_ms = 0;
  uint64_t total_words = 0;

  void add(const UtteranceRecord& r) {
    ++utterances;
    total_ms += to_millis(r.duration_s);
    total_words += word_count(r);
  }

  StatsAccumulator& merge(const StatsAccumulator& o) {
    utterances += o.utterances;
    total_ms += o.total_ms;
    total_words += o.total_words;
    return *this;
  }
};

struct LanguageStats {
  std::string language;
  StatsAccumulator sums;
  double total_duration = 0.0;  // in the table unit
  double avg_duration_s = 0.0;
  double avg_words = 0.0;

  static LanguageStats from_sums(std::string language, const StatsAccumulator& s, DurationUnit unit) {
    LanguageStats row{std::move(language), s};
    const double seconds = static_cast<double>(s.total_ms) / 1000.0;
    row.total_duration = seconds / unit_seconds(unit);
    if (s.utterances) {
      row.avg_duration_s = seconds / static_cast<double>(s.utterances);
      row.avg_words = static_cast<double>(s.total_words) / static_cast<double>(s.utterances);
    }
    return row;
  }
};

struct StatsTable {
  DurationUnit unit = DurationUnit::hours;
  std::vector<LanguageStats> rows;  // ascending total duration, then code
  LanguageStats total;
};

inline StatsTable stats_from_sums(const std::map<std::string, StatsAccumulator>& per_language, DurationUnit unit) {
  StatsTable table;
  table.unit = unit;
  StatsAccumulator all;
  for (const auto& [lang, s] : per_language) {
    table.rows.push_back(LanguageStats::from_sums(lang, s, unit));
    all.merge(s);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& a, const auto& b) { return a.sums.total_ms < b.sums.total_ms; });
  table.total = LanguageStats::from_sums("total", all, unit);
  return table;
}

inline StatsTable compute_stats(std::span<const UtteranceRecord> records, DurationUnit unit = DurationUnit::hours) {
  std::map<std::string, StatsAccumulator> per_language;
  for (const auto& r : records) per_language[r.language].add(r);
  return stats_from_sums(per_language, unit);
}

/// Aligned plain-text table, two decimals for every real-valued column.
inline std::string render_stats_table(const StatsTable& t) {
  const std::vector<std::string> header = {"Language",
                                           std::string("Total Duration (") + unit_label(t.unit) + ")",
                                           "Avg. Duration (s)",
                                           "Utterances",
                                           "Total Words",
                                           "Avg. Words"};
  std::vector<std::vector<std::string>> cells;
  auto row_cells = [](const LanguageStats& r) {
    return std::vector<std::string>{r.language,
                                    fixed(r.total_duration, 2),
                                    fixed(r.avg_duration_s, 2),
                                    std::to_string(r.sums.utterances),
                                    std::to_string(r.sums.total_words),
                                    fixed(r.avg_words, 2)};
  };
  for (const auto& r : t.rows) cells.push_back(row_cells(r));
  cells.push_back(row_cells(t.total));

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      if (c == 0)
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      else
        out << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : cells) emit(row);
  return out.str();
}

inline Json stats_to_json(const StatsTable& t) {
  auto row_json = [](const LanguageStats& r) {
    Json j;
    j["language"] = r.language;
    j["utterances"] = r.sums.utterances;
    j["total_ms"] = r.sums.total_ms;
    j["total_words"] = r.sums.total_words;
    j["total_duration"] = quantize(r.total_duration, 2);
    j["avg_duration_s"] = quantize(r.avg_duration_s, 2);
    j["avg_words"] = quantize(r.avg_words, 2);
    return j;
  };
  Json j;
  j["unit"] = unit_label(t.unit);
  j["rows"] = Json::array();
  for (const auto& r : t.rows) j["rows"].push_back(row_json(r));
  j["total"] = row_json(t.total);
  return j;
}

}  // namespace lemas
