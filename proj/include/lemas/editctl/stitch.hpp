// SPDX-License-Identifier: Apache-2.0
#pragma once

// Long-form chunking and splice-at-zero-crossing reassembly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "lemas/error.hpp"

namespace lemas::edit {

struct ChunkInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const ChunkInterval&) const = default;
};

/// Intervals of at most `max_chunk_s` starting every (max - overlap) seconds
/// until `duration_s` is covered. The last chunk may be shorter.
inline std::vector<ChunkInterval> chunk(double duration_s, double max_chunk_s, double overlap_s) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw InvalidArgument("chunk: duration must be positive");
  if (!(overlap_s > 0.0) || !(max_chunk_s > overlap_s) || !std::isfinite(max_chunk_s))
    throw InvalidArgument("chunk: need max_chunk_s > overlap_s > 0");
  const double stride = max_chunk_s - overlap_s;
  std::vector<ChunkInterval> out;
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * stride;
    const double end = std::min(start + max_chunk_s, duration_s);
    out.push_back({start, end});
    if (end >= duration_s) break;
  }
  return out;
}

struct Splice {
  std::size_t overlap_begin = 0;  // output index of the first overlapped sample
  std::size_t overlap_len = 0;
  std::size_t splice = 0;      // output index of the chosen zero crossing
  std::size_t fade_begin = 0;  // output index of the first faded sample
  bool fallback = false;       // no usable zero crossing; midpoint used
};

struct StitchPlan {
  std::vector<std::size_t> segment_starts;  // output index where each segment begins
  std::size_t fade_samples = 0;
  std::vector<Splice> splices;
};

struct StitchResult {
  std::vector<double> samples;
  StitchPlan plan;
};

namespace detail {

inline bool zero_crossing_at(std::span<const double> x, std::size_t j) {
  if (x[j] == 0.0) return true;
  return j > 0 && ((x[j - 1] < 0.0 && x[j] > 0.0) || (x[j - 1] > 0.0 && x[j] < 0.0));
}

}  // namespace detail

/// Joins segments where segment i+1 starts `overlaps[i]` samples before the
/// end of segment i. In each overlap the splice is the zero crossing of the
/// earlier segment nearest the overlap midpoint (ties to the earlier index)
/// whose centred fade window fits in the overlap. The window blends linearly
/// from the earlier to the later segment; every other sample is copied.
inline StitchResult stitch(std::span<const std::vector<double>> segments, std::span<const std::size_t> overlaps,
                           uint32_t sample_rate, double fade_s) {
  if (segments.empty()) throw InvalidArgument("stitch: no segments");
  if (overlaps.size() + 1 != segments.size()) throw InvalidArgument("stitch: need one overlap per adjacent pair");
  if (sample_rate == 0) throw InvalidArgument("stitch: sample rate must be positive");
  if (!(fade_s > 0.0)) throw InvalidArgument("stitch: fade must be positive");
  const auto F = static_cast<std::size_t>(std::llround(fade_s * sample_rate));
  if (F == 0) throw InvalidArgument("stitch: fade shorter than one sample");

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::size_t left = i > 0 ? overlaps[i - 1] : 0;
    const std::size_t right = i + 1 < segments.size() ? overlaps[i] : 0;
    if (left + right > segments[i].size())
      throw InvalidArgument("stitch: segment " + std::to_string(i) + " shorter than its overlaps");
  }

  StitchResult res;
  res.plan.fade_samples = F;
  auto& out = res.samples;
  out = segments[0];
  res.plan.segment_starts.push_back(0);

  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const std::size_t O = overlaps[i];
    if (O < F)
      throw InvalidArgument("stitch: overlap " + std::to_string(i) + " (" + std::to_string(O) +
                            " samples) shorter than fade (" + std::to_string(F) + ")");
    const auto& b = segments[i + 1];
    const std::size_t base = out.size() - O;
    const std::span<const double> a_ov(out.data() + base, O);

    Splice sp;
    sp.overlap_begin = base;
    sp.overlap_len = O;
    const std::size_t half = F / 2;
    bool found = false;
    std::size_t best = 0;
    for (std::size_t j = half; j + F - half <= O; ++j) {
      if (!detail::zero_crossing_at(a_ov, j)) continue;
      const auto dist = [O](std::size_t k) { return std::llabs(2 * static_cast<long long>(k) - static_cast<long long>(O)); };
      if (!found || dist(j) < dist(best)) best = j;
      found = true;
    }
    if (!found) {
      sp.fallback = true;
      best = O / 2;
    }
    const std::size_t w0 = std::min(best >= half ? best - half : 0, O - F);
    sp.splice = base + best;
    sp.fade_begin = base + w0;

    for (std::size_t j = w0; j < w0 + F; ++j) {
      const double w = static_cast<double>(j - w0 + 1) / static_cast<double>(F + 1);
      out[base + j] = a_ov[j] + w * (b[j] - a_ov[j]);
    }
    for (std::size_t j = w0 + F; j < O; ++j) out[base + j] = b[j];
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(O), b.end());

    res.plan.segment_starts.push_back(base);
    res.plan.splices.push_back(sp);
  }
  return res;
}

}  // namespace lemas::edit
