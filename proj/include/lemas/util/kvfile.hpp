// SPDX-License-Identifier: Apache-2.0
#pragma once

// Plain-text configuration format shared by profiles, filter configs,
// adapter specs and pipeline configs:
//
//   # full-line comment
//   key = value
//
// Keys are unique within a file; surrounding whitespace is trimmed; values
// may contain spaces and '#'.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lemas/error.hpp"

namespace lemas {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(std::string_view text, const std::string& what) {
  const std::string s(trim(text));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw DataError(what + ": not a number: \"" + s + "\"");
  return v;
}

inline long long parse_int(std::string_view text, const std::string& what) {
  const auto s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError(what + ": not an integer: \"" + std::string(s) + "\"");
  return v;
}

class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text, const std::string& origin = "<string>") {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const auto line = trim(text.substr(pos, nl - pos));
      ++line_no;
      pos = nl + 1;
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw DataError(origin + ":" + std::to_string(line_no) + ": expected key = value");
      std::string key(trim(line.substr(0, eq)));
      std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw DataError(origin + ":" + std::to_string(line_no) + ": empty key");
      if (!kv.values_.emplace(key, value).second)
        throw DataError(origin + ":" + std::to_string(line_no) + ": duplicate key \"" + key + "\"");
    }
    return kv;
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw DataError(origin_ + ": missing key \"" + key + "\"");
    return *v;
  }

  std::string get_or(const std::string& key, std::string fallback) const { return get(key).value_or(fallback); }

  double get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(*v, origin_ + ": " + key) : fallback;
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    return v ? parse_int(*v, origin_ + ": " + key) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw DataError(origin_ + ": " + key + ": not a boolean: \"" + *v + "\"");
  }

  /// Entries whose key starts with `prefix`, with the prefix stripped.
  std::map<std::string, std::string> with_prefix(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
         ++it)
      out.emplace(it->first.substr(prefix.size()), it->second);
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace lemas
