// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/util/kvfile.hpp"
#include "lemas/util/unicode.hpp"

#ifndef LEMAS_DEFAULT_DATA_DIR
#define LEMAS_DEFAULT_DATA_DIR "data"
#endif

namespace lemas {

inline constexpr std::array<std::string_view, 10> kSupportedLanguages = {"zh", "en", "ru", "es", "id",
                                                                         "de", "pt", "vi", "fr", "it"};

inline bool is_supported_language(std::string_view code) {
  return std::find(kSupportedLanguages.begin(), kSupportedLanguages.end(), code) != kSupportedLanguages.end();
}

/// Root of the shipped data files; LEMAS_DATA_DIR overrides the build default.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("LEMAS_DATA_DIR"); env && *env) return env;
  return LEMAS_DEFAULT_DATA_DIR;
}

/// LEMAS_PROFILE_DIR overrides `<data_dir>/profiles`.
inline std::filesystem::path profile_dir() {
  if (const char* env = std::getenv("LEMAS_PROFILE_DIR"); env && *env) return env;
  return data_dir() / "profiles";
}

struct CodeRange {
  char32_t lo = 0;
  char32_t hi = 0;
};

/// Per-language character set, speech-rate bounds and rule-table id.
///
/// File format (`profiles/<lang>.profile`):
///   code = en
///   letters = 0041-005A 0061-007A 00C0-00D6   # hex code point ranges
///   punctuation = , . ! ? '                    # kept by normalize
///   min_ratio = 4.0
///   max_ratio = 30.0
///   rules = en                                 # number-expansion table
///   group_separator = ,                        # optional digit grouping
struct LanguageProfile {
  std::string code;
  std::vector<CodeRange> letters;
  std::u32string punctuation;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::string rules;
  char32_t group_separator = 0;

  bool allows_letter(char32_t cp) const {
    const char32_t lower = unicode::to_lower(cp);
    for (const auto& r : letters)
      if ((cp >= r.lo && cp <= r.hi) || (lower >= r.lo && lower <= r.hi)) return true;
    return false;
  }

  bool keeps_punct(char32_t cp) const { return punctuation.find(cp) != std::u32string::npos; }

  static LanguageProfile from_kv(const KeyValueFile& kv) {
    LanguageProfile p;
    p.code = kv.require("code");
    for (const auto& tok : split_ws(kv.require("letters"))) {
      const auto dash = tok.find('-');
      const auto lo = tok.substr(0, dash);
      const auto hi = dash == std::string::npos ? lo : tok.substr(dash + 1);
      CodeRange r{static_cast<char32_t>(std::stoul(lo, nullptr, 16)), static_cast<char32_t>(std::stoul(hi, nullptr, 16))};
      if (r.lo > r.hi) throw DataError(kv.origin() + ": inverted letter range " + tok);
      p.letters.push_back(r);
    }
    for (const auto& tok : split_ws(kv.get_or("punctuation", ""))) {
      const auto cps = unicode::decode_utf8(tok);
      if (cps.size() != 1) throw DataError(kv.origin() + ": punctuation entries must be single characters");
      p.punctuation.push_back(cps[0]);
    }
    p.min_ratio = parse_double(kv.require("min_ratio"), kv.origin() + ": min_ratio");
    p.max_ratio = parse_double(kv.require("max_ratio"), kv.origin() + ": max_ratio");
    if (!(p.min_ratio < p.max_ratio)) throw DataError(kv.origin() + ": min_ratio must be below max_ratio");
    p.rules = kv.get_or("rules", p.code);
    if (const auto sep = kv.get("group_separator")) {
      const auto cps = unicode::decode_utf8(*sep);
      if (cps.size() != 1) throw DataError(kv.origin() + ": group_separator must be one character");
      p.group_separator = cps[0];
    }
    return p;
  }

  static LanguageProfile load(const std::filesystem::path& path) {
    return from_kv(KeyValueFile::load(path.string()));
  }
};

class ProfileSet {
 public:
  ProfileSet() = default;

  /// Loads every `<code>.profile` in `dir`.
  static ProfileSet load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("profile directory not found: " + dir.string());
    ProfileSet set;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.path().extension() == ".profile") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) set.add(LanguageProfile::load(f));
    return set;
  }

  void add(LanguageProfile p) {
    auto code = p.code;
    profiles_.insert_or_assign(std::move(code), std::move(p));
  }

  const LanguageProfile* find(const std::string& code) const {
    const auto it = profiles_.find(code);
    return it == profiles_.end() ? nullptr : &it->second;
  }

  const LanguageProfile& at(const std::string& code) const {
    if (const auto* p = find(code)) return *p;
    throw DataError("no language profile for \"" + code + "\"");
  }

  std::size_t size() const { return profiles_.size(); }
  const std::map<std::string, LanguageProfile>& all() const { return profiles_; }

 private:
  std::map<std::string, LanguageProfile> profiles_;
};

}  // namespace lemas
