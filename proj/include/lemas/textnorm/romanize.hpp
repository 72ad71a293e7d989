// SPDX-License-Identifier: Apache-2.0
#pragma once

// Table-driven romanization into the shared alignment alphabet [a-z'].
//
// Table files (`tables/*.map`) hold one mapping per line:
//   <hex code point><TAB><latin>     # latin may be empty (the sign is dropped)
// Lines starting with '#' are comments.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/util/kvfile.hpp"
#include "lemas/util/unicode.hpp"

namespace lemas {

class TransliterationTable {
 public:
  static TransliterationTable load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open transliteration table " + path.string());
    TransliterationTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty() || line.front() == '#') continue;
      const auto tab = line.find_first_of("\t ");
      const std::string hex = line.substr(0, tab);
      const std::string value = tab == std::string::npos ? std::string() : std::string(trim(line.substr(tab + 1)));
      char32_t cp = 0;
      try {
        cp = static_cast<char32_t>(std::stoul(hex, nullptr, 16));
      } catch (const std::exception&) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad code point \"" + hex + "\"");
      }
      for (char c : value)
        if (!((c >= 'a' && c <= 'z') || c == '\''))
          throw DataError(path.string() + ":" + std::to_string(line_no) + ": value outside [a-z']");
      t.map_[cp] = value;
    }
    return t;
  }

  void insert(char32_t cp, std::string latin) { map_[cp] = std::move(latin); }

  void merge(const TransliterationTable& other) {
    for (const auto& [cp, v] : other.map_) map_[cp] = v;
  }

  const std::string* find(char32_t cp) const {
    const auto it = map_.find(cp);
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<char32_t, std::string> map_;
};

struct RomanizeOptions {
  /// One token per Han character instead of per delimited group.
  bool split_han_chars = false;
};

/// A source word and its romanized form.
struct RomanWord {
  std::string source;
  std::string latin;
};

class Romanizer {
 public:
  explicit Romanizer(TransliterationTable table) : table_(std::move(table)) {}

  /// Latin folding, Cyrillic and pinyin tables from `<dir>`.
  static Romanizer load(const std::filesystem::path& dir = data_dir() / "tables") {
    TransliterationTable t;
    for (const char* name : {"latin_fold.map", "cyrillic.map", "pinyin.map"}) t.merge(TransliterationTable::load(dir / name));
    return Romanizer(std::move(t));
  }

  /// Split normalized text into words and romanize each. Words are delimited
  /// by whitespace and punctuation other than the apostrophe; words that
  /// romanize to nothing are dropped.
  std::vector<RomanWord> words(std::string_view normalized, std::string_view language,
                               const RomanizeOptions& opts = {}) const {
    const auto cps = unicode::decode_utf8(normalized);
    const bool split_han = opts.split_han_chars && language == "zh";
    std::vector<RomanWord> out;
    std::u32string group;

    auto flush = [&] {
      std::size_t b = 0, e = group.size();
      while (b < e && group[b] == U'\'') ++b;
      while (e > b && group[e - 1] == U'\'') --e;
      if (b < e) {
        const std::u32string_view word(group.data() + b, e - b);
        std::string latin = transliterate(word);
        if (!latin.empty()) out.push_back({unicode::encode_utf8(word), std::move(latin)});
      }
      group.clear();
    };

    for (char32_t cp : cps) {
      const bool word_char = cp == U'\'' || unicode::is_letter(cp) || unicode::is_mark(cp) || unicode::is_ascii_digit(cp);
      if (!word_char) {
        flush();
        continue;
      }
      if (split_han && unicode::is_han(cp)) {
        flush();
        group.push_back(cp);
        flush();
        continue;
      }
      group.push_back(cp);
    }
    flush();
    return out;
  }

  std::vector<std::string> romanize(std::string_view normalized, std::string_view language,
                                    const RomanizeOptions& opts = {}) const {
    std::vector<std::string> tokens;
    for (auto& w : words(normalized, language, opts)) tokens.push_back(std::move(w.latin));
    return tokens;
  }

 private:
  std::string transliterate(std::u32string_view word) const {
    std::string out;
    for (char32_t cp : word) {
      if (cp == U'\'') {
        out += '\'';
        continue;
      }
      if (unicode::is_mark(cp)) continue;
      const char32_t lower = unicode::to_lower(cp);
      if (lower >= U'a' && lower <= U'z') {
        out += static_cast<char>(lower);
        continue;
      }
      const std::string* latin = table_.find(lower);
      if (!latin) latin = table_.find(cp);
      if (!latin) throw UnknownCharacter(cp, "unmappable code point " + unicode::format_code_point(cp));
      out += *latin;
    }
    return out;
  }

  TransliterationTable table_;
};

}  // namespace lemas
