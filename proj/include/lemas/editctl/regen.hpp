// SPDX-License-Identifier: Apache-2.0
#pragma once

// Adaptive re-generation policy for masked speech editing. The controller is
// a value: each step returns the next controller instead of mutating state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "lemas/editctl/penalty.hpp"
#include "lemas/error.hpp"

namespace lemas::edit {

struct RegenController {
  double avg_speed = 0.0;  // frames per text token
  double max_rate = 0.0;   // optional cap for the caller's decoder; 0 = none
  uint32_t round = 0;
  uint32_t max_rounds = 3;
  int64_t mask_start = 0;  // frames, half-open [start, end)
  int64_t mask_end = 0;
  PenaltyParams penalty{};
  int64_t expansion_frames = 25;  // 0.5 s at 50 frames/s
  double penalty_delta = 1.0;
  std::optional<int64_t> limit_frames;  // clamp for mask_end

  void check() const {
    if (!(avg_speed > 0.0) || !std::isfinite(avg_speed)) throw InvalidArgument("avg_speed must be positive");
    if (!(max_rate >= 0.0)) throw InvalidArgument("max_rate must be >= 0");
    if (round > max_rounds) throw InvalidArgument("round exceeds max_rounds");
    if (mask_start < 0 || !(mask_start < mask_end)) throw InvalidArgument("mask must satisfy 0 <= start < end");
    if (limit_frames && mask_end > *limit_frames) throw InvalidArgument("mask end beyond frame limit");
    if (expansion_frames < 0 || !(penalty_delta >= 0.0)) throw InvalidArgument("expansion and delta must be >= 0");
    penalty.check();
  }

  int64_t mask_width() const { return mask_end - mask_start; }

  /// Upper bound on frames to generate for `tokens`, from max_rate.
  std::optional<uint64_t> max_frames(uint64_t tokens) const {
    if (max_rate <= 0.0) return std::nullopt;
    return static_cast<uint64_t>(std::ceil(max_rate * static_cast<double>(tokens)));
  }
};

struct RegenOutcome {
  bool re_gen_flag = false;
  uint64_t generated_frames = 0;
  uint64_t target_tokens = 0;
};

/// Output shorter than half the baseline rate.
inline bool pathologically_short(const RegenController& c, const RegenOutcome& o) {
  return static_cast<double>(o.generated_frames) < 0.5 * c.avg_speed * static_cast<double>(o.target_tokens);
}

inline bool failing(const RegenController& c, const RegenOutcome& o) { return o.re_gen_flag || pathologically_short(c, o); }

enum class RegenAction { accept, retry, give_up };

inline const char* action_name(RegenAction a) {
  switch (a) {
    case RegenAction::accept: return "accept";
    case RegenAction::retry: return "retry";
    case RegenAction::give_up: return "give_up";
  }
  return "?";
}

struct RegenDecision {
  RegenAction action = RegenAction::accept;
  RegenController next;  // the controller to use after this step
};

inline RegenDecision regen_step(const RegenController& c, const RegenOutcome& o) {
  c.check();
  if (!failing(c, o)) return {RegenAction::accept, c};
  if (c.round >= c.max_rounds) return {RegenAction::give_up, c};
  RegenController n = c;
  ++n.round;
  n.mask_start = std::max<int64_t>(0, c.mask_start - c.expansion_frames);
  n.mask_end = c.mask_end + c.expansion_frames;
  if (n.limit_frames) n.mask_end = std::min(n.mask_end, *n.limit_frames);
  n.penalty.repetition_penalty = c.penalty.repetition_penalty + c.penalty_delta;
  return {RegenAction::retry, n};
}

}  // namespace lemas::edit
