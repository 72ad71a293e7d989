// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sampling-control kernels for flow-matching inference: classifier-free
// guidance with a quadratically decaying strength, and power-law (sway)
// time grids.

#include <cmath>
#include <span>
#include <vector>

#include "lemas/error.hpp"

namespace lemas::flow {

struct GuidanceParams {
  double lambda = 5.0;

  void check() const {
    if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidArgument("guidance scale must be finite and >= 0");
  }
};

struct SwayParams {
  double gamma = 0.0;
  std::size_t steps = 32;

  void check() const {
    if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidArgument("sway gamma must be finite and >= 0");
    if (steps == 0) throw InvalidArgument("sway grid needs at least one step");
  }
};

/// g(t) = lambda * (1 - t)^2 for t in [0, 1].
inline double cfg_strength(double t, const GuidanceParams& p = {}) {
  p.check();
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("flow time must lie in [0, 1]");
  const double u = 1.0 - t;
  return p.lambda * u * u;
}

/// cond + g * (cond - uncond), elementwise.
inline std::vector<double> cfg_combine(std::span<const double> cond, std::span<const double> uncond, double g) {
  if (cond.size() != uncond.size()) throw InvalidArgument("cfg_combine: length mismatch");
  std::vector<double> out(cond.size());
  for (std::size_t i = 0; i < cond.size(); ++i) out[i] = cond[i] + g * (cond[i] - uncond[i]);
  return out;
}

/// t_k = (k/K)^(1+gamma), k = 0..K. Endpoints are exactly 0 and 1.
inline std::vector<double> sway_grid(const SwayParams& p) {
  p.check();
  const std::size_t K = p.steps;
  std::vector<double> t(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(K);
    t[k] = std::pow(s, 1.0 + p.gamma);
  }
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

inline std::vector<double> sway_grid(double gamma, std::size_t steps) { return sway_grid(SwayParams{gamma, steps}); }

}  // namespace lemas::flow
