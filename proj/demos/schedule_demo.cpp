// SPDX-License-Identifier: Apache-2.0
// Prints the sway-sampled timestep grid with the guidance strength at each
// step, then walks one regeneration episode with the edit controller.

#include <cstdio>

#include "lemas/editctl/regen.hpp"
#include "lemas/flowsched.hpp"

using namespace lemas;

int main() {
  const std::size_t K = 8;
  std::printf("%4s %10s %10s %10s %10s\n", "k", "uniform", "gamma=0", "gamma=1", "g(t)");
  const auto flat = flow::sway_grid(0.0, K), swayed = flow::sway_grid(1.0, K);
  for (std::size_t k = 0; k <= K; ++k)
    std::printf("%4zu %10.4f %10.4f %10.4f %10.4f\n", k, static_cast<double>(k) / K, flat[k], swayed[k],
                flow::cfg_strength(swayed[k]));

  edit::RegenController c;
  c.avg_speed = 5.0;
  c.mask_start = 400;
  c.mask_end = 520;
  c.penalty.repetition_penalty = 1.0;
  const uint64_t tokens = 24;
  const std::pair<uint64_t, bool> attempts[] = {{31, false}, {140, true}, {118, false}};
  std::printf("\nedit of %llu tokens, average %.1f frames/token\n", static_cast<unsigned long long>(tokens), c.avg_speed);
  for (const auto& [frames, flag] : attempts) {
    const edit::RegenOutcome o{flag, frames, tokens};
    const auto d = edit::regen_step(c, o);
    std::printf("round %u: %3llu frames%s -> %-7s mask [%lld, %lld] penalty %.1f\n", c.round,
                static_cast<unsigned long long>(frames), flag ? " (flagged)" : "", edit::action_name(d.action),
                static_cast<long long>(d.next.mask_start), static_cast<long long>(d.next.mask_end),
                d.next.penalty.repetition_penalty);
    if (d.action != edit::RegenAction::retry) break;
    c = d.next;
  }
  return 0;
}
