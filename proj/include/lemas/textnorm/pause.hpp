// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lemas/error.hpp"
#include "lemas/manifest.hpp"

namespace lemas {

/// Inter-word gap thresholds (seconds) for the pause tags #1..#4: a gap at or
/// above thresholds[i] and below thresholds[i+1] gets tag #(i+1).
struct PauseTagging {
  std::array<double, 4> thresholds{0.15, 0.40, 0.80, 2.0};

  void check() const {
    if (!(thresholds[0] > 0.0)) throw InvalidArgument("pause thresholds must be positive");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
      if (!(thresholds[i - 1] < thresholds[i])) throw InvalidArgument("pause thresholds must be strictly increasing");
  }

  /// 0 for no tag, otherwise 1..4.
  int level(double gap_s) const {
    int lvl = 0;
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (gap_s >= thresholds[i]) lvl = static_cast<int>(i) + 1;
    return lvl;
  }
};

/// Words interleaved with "#1".."#4" tags for the gaps between them.
inline std::vector<std::string> pause_tags(std::span<const WordSpan> words, const PauseTagging& tagging = {}) {
  tagging.check();
  std::vector<std::string> out;
  out.reserve(words.size() * 2);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      const double gap = words[i].start_s - words[i - 1].end_s;
      if (gap < 0.0) throw InvalidArgument("word spans out of order at index " + std::to_string(i));
      if (const int lvl = tagging.level(gap)) out.push_back("#" + std::to_string(lvl));
    }
    out.push_back(words[i].word);
  }
  return out;
}

}  // namespace lemas
