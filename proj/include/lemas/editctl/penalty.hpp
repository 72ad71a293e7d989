// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lemas/error.hpp"

namespace lemas::edit {

struct PenaltyParams {
  double repetition_penalty = 0.0;

  void check() const {
    if (!std::isfinite(repetition_penalty) || repetition_penalty < 0.0)
      throw InvalidArgument("repetition_penalty must be finite and >= 0");
  }
};

/// repetition_penalty / 100 * num_gen + 1
inline double penalty_factor(const PenaltyParams& p, uint64_t num_gen) {
  p.check();
  return p.repetition_penalty / 100.0 * static_cast<double>(num_gen) + 1.0;
}

/// Positive logits of history tokens are divided by `factor`, negative ones
/// multiplied; zeros and tokens outside the history are left alone.
inline std::vector<double> apply_penalty(std::span<const double> logits, std::span<const std::size_t> history,
                                         double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) throw InvalidArgument("penalty factor must be finite and >= 1");
  std::vector<double> out(logits.begin(), logits.end());
  std::vector<bool> seen(logits.size(), false);
  for (auto tok : history) {
    if (tok >= logits.size()) throw InvalidArgument("history token " + std::to_string(tok) + " outside logits");
    if (seen[tok]) continue;
    seen[tok] = true;
    if (out[tok] > 0.0)
      out[tok] /= factor;
    else if (out[tok] < 0.0)
      out[tok] *= factor;
  }
  return out;
}

/// Frames per text token.
inline double avg_speed(uint64_t frame_count, uint64_t token_count) {
  if (token_count == 0) throw InvalidArgument("avg_speed: zero tokens");
  return static_cast<double>(frame_count) / static_cast<double>(token_count);
}

}  // namespace lemas::edit
