// SPDX-License-Identifier: Apache-2.0
#pragma once

// Rule-based quality filters. Every filter returns the set of reasons it
// fails on; the chain takes the union, so the result does not depend on
// evaluation order and reports all reasons at once.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lemas/aligner/ctc.hpp"
#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/util/kvfile.hpp"

namespace lemas {

enum class Reason : uint8_t {
  low_confidence,
  too_short,
  too_long,
  long_gap,
  rate_low,
  rate_high,
  bad_charset,
  bad_language,
};

inline constexpr std::array<Reason, 8> kAllReasons = {Reason::low_confidence, Reason::too_short, Reason::too_long,
                                                      Reason::long_gap,       Reason::rate_low,  Reason::rate_high,
                                                      Reason::bad_charset,    Reason::bad_language};

inline const char* reason_name(Reason r) {
  switch (r) {
    case Reason::low_confidence: return "low_confidence";
    case Reason::too_short: return "too_short";
    case Reason::too_long: return "too_long";
    case Reason::long_gap: return "long_gap";
    case Reason::rate_low: return "rate_low";
    case Reason::rate_high: return "rate_high";
    case Reason::bad_charset: return "bad_charset";
    case Reason::bad_language: return "bad_language";
  }
  return "?";
}

class ReasonSet {
 public:
  ReasonSet() = default;
  ReasonSet(std::initializer_list<Reason> rs) {
    for (auto r : rs) add(r);
  }

  void add(Reason r) { bits_ |= bit(r); }
  bool has(Reason r) const { return (bits_ & bit(r)) != 0; }
  bool empty() const { return bits_ == 0; }

  ReasonSet& operator|=(ReasonSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  bool operator==(const ReasonSet&) const = default;

  /// Reasons in canonical order.
  std::vector<Reason> list() const {
    std::vector<Reason> out;
    for (auto r : kAllReasons)
      if (has(r)) out.push_back(r);
    return out;
  }

 private:
  static uint16_t bit(Reason r) { return static_cast<uint16_t>(1u << static_cast<unsigned>(r)); }
  uint16_t bits_ = 0;
};

struct FilterVerdict {
  std::vector<Reason> reasons;
  bool pass() const { return reasons.empty(); }
};

struct FilterConfig {
  double default_threshold = 0.3;
  std::map<std::string, double> source_thresholds;
  std::map<std::string, double> language_thresholds;
  std::map<std::pair<std::string, std::string>, double> pair_thresholds;
  double min_dur_s = 0.5;
  double max_dur_s = 30.0;
  double max_gap_s = 4.0;
  double max_symbol_fraction = kDefaultMaxSymbolFraction;
  std::set<std::string> languages{kSupportedLanguages.begin(), kSupportedLanguages.end()};
  std::shared_ptr<const ProfileSet> profiles;

  /// (source, language) -> source -> language -> default.
  double threshold_for(const std::string& source, const std::string& language) const {
    if (const auto it = pair_thresholds.find({source, language}); it != pair_thresholds.end()) return it->second;
    if (const auto it = source_thresholds.find(source); it != source_thresholds.end()) return it->second;
    if (const auto it = language_thresholds.find(language); it != language_thresholds.end()) return it->second;
    return default_threshold;
  }

  const LanguageProfile* profile(const std::string& code) const { return profiles ? profiles->find(code) : nullptr; }

  void check() const {
    auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
    bool thresholds_ok = ok(default_threshold);
    for (const auto& [k, v] : source_thresholds) thresholds_ok = thresholds_ok && ok(v);
    for (const auto& [k, v] : language_thresholds) thresholds_ok = thresholds_ok && ok(v);
    for (const auto& [k, v] : pair_thresholds) thresholds_ok = thresholds_ok && ok(v);
    if (!thresholds_ok) throw InvalidArgument("confidence thresholds must be finite and non-negative");
    if (!(min_dur_s < max_dur_s)) throw InvalidArgument("min_dur_s must be below max_dur_s");
    if (!(min_dur_s >= 0.0) || !(max_gap_s >= 0.0)) throw InvalidArgument("duration bounds must be non-negative");
  }

  /// Keys (after `prefix`):
  ///   threshold.default, threshold.source.<src>, threshold.language.<lang>,
  ///   threshold.pair.<src>.<lang>, min_dur_s, max_dur_s, max_gap_s,
  ///   max_symbol_fraction, languages (space separated)
  static FilterConfig from_kv(const KeyValueFile& kv, const std::string& prefix = "") {
    FilterConfig c;
    const auto key = [&](const char* k) { return prefix + k; };
    c.default_threshold = kv.get_double(key("threshold.default"), c.default_threshold);
    for (const auto& [src, v] : kv.with_prefix(key("threshold.source.")))
      c.source_thresholds[src] = parse_double(v, "threshold.source." + src);
    for (const auto& [lang, v] : kv.with_prefix(key("threshold.language.")))
      c.language_thresholds[lang] = parse_double(v, "threshold.language." + lang);
    for (const auto& [pair, v] : kv.with_prefix(key("threshold.pair."))) {
      const auto dot = pair.rfind('.');
      if (dot == std::string::npos) throw DataError("threshold.pair." + pair + ": expected <source>.<language>");
      c.pair_thresholds[{pair.substr(0, dot), pair.substr(dot + 1)}] = parse_double(v, "threshold.pair." + pair);
    }
    c.min_dur_s = kv.get_double(key("min_dur_s"), c.min_dur_s);
    c.max_dur_s = kv.get_double(key("max_dur_s"), c.max_dur_s);
    c.max_gap_s = kv.get_double(key("max_gap_s"), c.max_gap_s);
    c.max_symbol_fraction = kv.get_double(key("max_symbol_fraction"), c.max_symbol_fraction);
    if (const auto langs = kv.get(key("languages"))) {
      const auto list = split_ws(*langs);
      c.languages = {list.begin(), list.end()};
    }
    c.check();
    return c;
  }
};

/// Text used for rate and ratio computations: normalized when available.
inline const std::string& rate_text(const UtteranceRecord& r) {
  return r.normalized_text.empty() ? r.raw_text : r.normalized_text;
}

/// Fails unless the confidence strictly exceeds the applicable threshold.
inline ReasonSet filter_confidence(const UtteranceRecord& r, const FilterConfig& c) {
  if (!r.avg_confidence) throw BadInput("record \"" + r.key + "\" has no avg_confidence");
  if (*r.avg_confidence <= c.threshold_for(r.source, r.language)) return {Reason::low_confidence};
  return {};
}

/// Bounds are inclusive: only strictly shorter/longer records fail.
inline ReasonSet filter_duration(const UtteranceRecord& r, const FilterConfig& c) {
  ReasonSet out;
  if (r.duration_s < c.min_dur_s) out.add(Reason::too_short);
  if (r.duration_s > c.max_dur_s) out.add(Reason::too_long);
  return out;
}

/// Fails when any unaligned interval strictly exceeds max_gap_s.
inline ReasonSet filter_gaps(const UtteranceRecord& r, const FilterConfig& c) {
  if (longest_gap(r.words, r.duration_s) > c.max_gap_s) return {Reason::long_gap};
  return {};
}

/// Speech-rate ratio must lie in the closed interval of the profile.
inline ReasonSet filter_rate(const UtteranceRecord& r, const LanguageProfile& p) {
  const double ratio = char_ratio(rate_text(r), r.duration_s);
  if (ratio < p.min_ratio) return {Reason::rate_low};
  if (ratio > p.max_ratio) return {Reason::rate_high};
  return {};
}

inline ReasonSet filter_language(const UtteranceRecord& r, const FilterConfig& c) {
  if (!c.languages.count(r.language)) return {Reason::bad_language};
  const auto* p = c.profile(r.language);
  if (!p) throw BadInput("no language profile loaded for \"" + r.language + "\"");
  if (!validate_charset(r.raw_text, *p, c.max_symbol_fraction).pass) return {Reason::bad_charset};
  return {};
}

enum class FilterStage { confidence, duration, gaps, rate, language };

inline constexpr std::array<FilterStage, 5> kFilterStages = {FilterStage::confidence, FilterStage::duration,
                                                             FilterStage::gaps, FilterStage::rate, FilterStage::language};

inline ReasonSet run_filter(FilterStage stage, const UtteranceRecord& r, const FilterConfig& c) {
  switch (stage) {
    case FilterStage::confidence: return filter_confidence(r, c);
    case FilterStage::duration: return filter_duration(r, c);
    case FilterStage::gaps: return filter_gaps(r, c);
    case FilterStage::rate: {
      // Rate bounds only exist for whitelisted languages with a profile.
      const auto* p = c.languages.count(r.language) ? c.profile(r.language) : nullptr;
      return p ? filter_rate(r, *p) : ReasonSet{};
    }
    case FilterStage::language: return filter_language(r, c);
  }
  return {};
}

/// All filters, no short-circuit. BadInput propagates.
inline FilterVerdict run_chain(const UtteranceRecord& r, const FilterConfig& c,
                               std::span<const FilterStage> order = kFilterStages) {
  ReasonSet all;
  for (auto stage : order) all |= run_filter(stage, r, c);
  return {all.list()};
}

/// (p-th, (100-p)-th) nearest-rank percentiles of the speech-rate ratio,
/// taken symmetrically: the rank-th smallest and the rank-th largest value.
inline std::pair<double, double> fit_ratio_bounds(std::span<const UtteranceRecord> records, const std::string& language,
                                                  double percentile = 1.0) {
  if (!(percentile >= 0.0 && percentile <= 50.0)) throw InvalidArgument("percentile must lie in [0, 50]");
  std::vector<double> ratios;
  for (const auto& r : records)
    if (r.language == language) ratios.push_back(char_ratio(rate_text(r), r.duration_s));
  if (ratios.size() < 20)
    throw InsufficientData("need at least 20 records of \"" + language + "\", have " + std::to_string(ratios.size()));
  std::sort(ratios.begin(), ratios.end());
  const std::size_t n = ratios.size();
  auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) / 100.0 - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return {ratios[rank - 1], ratios[n - rank]};
}

}  // namespace lemas
