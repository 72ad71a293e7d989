// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "lemas/textnorm/numbers.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/util/unicode.hpp"

namespace lemas {

/// No linguistic content left (empty input, or nothing but punctuation).
class EmptyText : public DataError {
 public:
  using DataError::DataError;
};

namespace textnorm_detail {

inline bool is_apostrophe_variant(char32_t cp) {
  return cp == U'’' || cp == U'‘' || cp == U'ʼ' || cp == U'`' || cp == U'´';
}

inline bool is_wordish(char32_t cp) {
  return unicode::is_letter(cp) || unicode::is_mark(cp) || unicode::is_ascii_digit(cp);
}

/// Replace digit runs (with optional language digit grouping) by words.
inline std::u32string expand_numbers(const std::u32string& in, const LanguageProfile& profile) {
  std::u32string out;
  out.reserve(in.size());
  const bool pad = profile.rules != "zh";
  std::size_t i = 0;
  while (i < in.size()) {
    if (!unicode::is_ascii_digit(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < in.size() && unicode::is_ascii_digit(in[j])) ++j;
    std::string digits = unicode::encode_utf8(in.substr(i, j - i));
    if (profile.group_separator && digits.size() <= 3) {
      // 1,234,567 style: separator followed by exactly three digits.
      while (j < in.size() && in[j] == profile.group_separator) {
        std::size_t k = j + 1;
        while (k < in.size() && unicode::is_ascii_digit(in[k])) ++k;
        if (k - j - 1 != 3) break;
        digits += unicode::encode_utf8(in.substr(j + 1, 3));
        j = k;
      }
    }
    const auto words = unicode::decode_utf8(numbers::expand_digits(profile.rules, digits));
    if (pad && !out.empty() && is_wordish(out.back())) out.push_back(U' ');
    out += words;
    if (pad && j < in.size() && is_wordish(in[j])) out.push_back(U' ');
    i = j;
  }
  return out;
}

}  // namespace textnorm_detail

/// Language-specific normalization: NFC, lowercase, number expansion,
/// punctuation filtering (whitelist kept, repeats collapsed, everything else
/// becomes a space), whitespace collapse. Idempotent.
inline std::string normalize(std::string_view text, const LanguageProfile& profile) {
  using namespace textnorm_detail;
  auto cps = unicode::decode_utf8(unicode::nfc(text));
  if (std::all_of(cps.begin(), cps.end(), unicode::is_space)) throw EmptyText("empty input");

  for (auto& cp : cps) {
    if (is_apostrophe_variant(cp)) cp = U'\'';
    cp = unicode::to_lower(cp);
  }
  cps = expand_numbers(cps, profile);

  std::u32string kept;
  kept.reserve(cps.size());
  for (char32_t cp : cps) {
    if (unicode::is_letter(cp) || unicode::is_mark(cp)) {
      kept.push_back(cp);
    } else if (!unicode::is_space(cp) && profile.keeps_punct(cp)) {
      if (kept.empty() || kept.back() != cp) kept.push_back(cp);
    } else {
      kept.push_back(U' ');
    }
  }

  std::u32string out;
  out.reserve(kept.size());
  for (char32_t cp : kept) {
    if (cp == U' ' && (out.empty() || out.back() == U' ')) continue;
    out.push_back(cp);
  }
  while (!out.empty() && out.back() == U' ') out.pop_back();

  if (std::none_of(out.begin(), out.end(), unicode::is_letter)) throw EmptyText("empty after normalization");
  return unicode::encode_utf8(out);
}

struct CharsetVerdict {
  bool pass = true;
  /// Code points outside the language set (other scripts, emoji, symbols,
  /// controls), in order of first appearance.
  std::vector<char32_t> offending;
  /// Set when non-whitelisted punctuation exceeds the allowed fraction.
  bool excessive_symbols = false;
  std::vector<char32_t> symbols;
};

inline constexpr double kDefaultMaxSymbolFraction = 0.1;

/// Character validation of a transcript against a language profile.
///
/// Letters must fall in the profile's ranges; digits and whitespace are
/// allowed; emoji and Unicode symbol categories always fail. Punctuation
/// outside the profile whitelist counts as a non-linguistic symbol and fails
/// the text once it exceeds `max_symbol_fraction` of non-space characters.
inline CharsetVerdict validate_charset(std::string_view text, const LanguageProfile& profile,
                                       double max_symbol_fraction = kDefaultMaxSymbolFraction) {
  CharsetVerdict v;
  std::u32string cps;
  try {
    cps = unicode::decode_utf8(text);
  } catch (const DataError&) {
    v.pass = false;
    v.offending.push_back(U'�');
    return v;
  }
  auto note = [](std::vector<char32_t>& list, char32_t cp) {
    if (std::find(list.begin(), list.end(), cp) == list.end()) list.push_back(cp);
  };
  std::size_t non_space = 0;
  std::size_t symbol_count = 0;
  for (char32_t cp : cps) {
    if (unicode::is_space(cp)) continue;
    ++non_space;
    if (unicode::is_ascii_digit(cp) || unicode::is_mark(cp)) continue;
    if (unicode::is_emoji(cp) || unicode::is_symbol(cp)) {
      note(v.offending, cp);
    } else if (unicode::is_letter(cp)) {
      if (!profile.allows_letter(cp)) note(v.offending, cp);
    } else if (unicode::is_punct(cp)) {
      if (!profile.keeps_punct(cp) && !textnorm_detail::is_apostrophe_variant(cp)) {
        ++symbol_count;
        note(v.symbols, cp);
      }
    } else {
      note(v.offending, cp);
    }
  }
  if (non_space > 0 && static_cast<double>(symbol_count) > max_symbol_fraction * static_cast<double>(non_space))
    v.excessive_symbols = true;
  v.pass = v.offending.empty() && !v.excessive_symbols;
  return v;
}

/// Non-whitespace code points per second.
inline double char_ratio(std::string_view normalized_text, double duration_s) {
  if (!(duration_s > 0.0)) throw InvalidArgument("duration must be positive");
  const auto cps = unicode::decode_utf8(normalized_text);
  const auto n = std::count_if(cps.begin(), cps.end(), [](char32_t c) { return !unicode::is_space(c); });
  return static_cast<double>(n) / duration_s;
}

}  // namespace lemas
