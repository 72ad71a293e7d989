// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/util/decimal.hpp"

namespace lemas {

struct ShardItem {
  std::string key;
  int64_t duration_ms = 0;
};

struct ShardAssignment {
  std::size_t shard_count = 0;
  std::map<std::string, std::size_t> shard_of;
  std::vector<std::vector<std::string>> keys;  // per shard, in assignment order
  std::vector<int64_t> total_ms;               // per shard
};

/// Longest-processing-time greedy: items by descending duration (ties by
/// key), each to the currently lightest shard (ties to the lowest index).
inline ShardAssignment shard_items(std::vector<ShardItem> items, std::size_t n) {
  if (n == 0) throw InvalidArgument("shard count must be at least 1");
  std::sort(items.begin(), items.end(), [](const ShardItem& a, const ShardItem& b) {
    return a.duration_ms != b.duration_ms ? a.duration_ms > b.duration_ms : a.key < b.key;
  });
  ShardAssignment out;
  out.shard_count = n;
  out.keys.resize(n);
  out.total_ms.assign(n, 0);
  for (const auto& it : items) {
    if (out.shard_of.count(it.key)) throw InvalidArgument("duplicate key in shard input: " + it.key);
    const auto lightest =
        static_cast<std::size_t>(std::min_element(out.total_ms.begin(), out.total_ms.end()) - out.total_ms.begin());
    out.shard_of[it.key] = lightest;
    out.keys[lightest].push_back(it.key);
    out.total_ms[lightest] += it.duration_ms;
  }
  return out;
}

inline ShardAssignment shard(std::span<const UtteranceRecord> records, std::size_t n) {
  std::vector<ShardItem> items;
  items.reserve(records.size());
  for (const auto& r : records) items.push_back({r.key, to_millis(r.duration_s)});
  return shard_items(std::move(items), n);
}

inline Json shard_report(const ShardAssignment& a) {
  Json j;
  j["shards"] = a.shard_count;
  j["per_shard"] = Json::array();
  for (std::size_t s = 0; s < a.shard_count; ++s) {
    Json row;
    row["shard"] = s;
    row["records"] = a.keys[s].size();
    row["total_ms"] = a.total_ms[s];
    j["per_shard"].push_back(row);
  }
  return j;
}

}  // namespace lemas
