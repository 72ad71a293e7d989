// SPDX-License-Identifier: Apache-2.0
// Normalizes and romanizes a transcript, synthesizes a noisy CTC emission
// for it and prints the forced-alignment word spans.
//
//   align_demo [language] [text]

#include <cmath>
#include <cstdio>
#include <random>

#include "lemas/aligner/ctc.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/textnorm/romanize.hpp"

using namespace lemas;

int main(int argc, char** argv) {
  const std::string language = argc > 1 ? argv[1] : "de";
  const std::string text = argc > 2 ? argv[2] : "Guten Morgen, die Straße ist nass!";
  try {
    const auto profiles = ProfileSet::load_dir(profile_dir());
    const auto* profile = profiles.find(language);
    if (!profile) {
      std::fprintf(stderr, "no profile for \"%s\"\n", language.c_str());
      return 1;
    }
    const auto normalized = normalize(text, *profile);
    const auto words = Romanizer::load().words(normalized, language);
    std::printf("raw:        %s\nnormalized: %s\n", text.c_str(), normalized.c_str());

    std::vector<std::string> vocab = {"<b>"};
    for (char c = 'a'; c <= 'z'; ++c) vocab.emplace_back(1, c);
    vocab.emplace_back("'");

    // 8 blank frames, 4 frames per letter, a blank between words.
    std::vector<int> frames(8, 0);
    std::vector<std::string> tokens, sources;
    for (const auto& w : words) {
      tokens.push_back(w.latin);
      sources.push_back(w.source);
      for (std::size_t c = 0; c < w.latin.size(); ++c) {
        if (c > 0 && w.latin[c] == w.latin[c - 1]) frames.push_back(0);
        const int v = w.latin[c] == '\'' ? 27 : w.latin[c] - 'a' + 1;
        frames.insert(frames.end(), 4, v);
      }
      frames.push_back(0);
    }
    frames.insert(frames.end(), 8, 0);

    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> logits(frames.size() * vocab.size());
    for (std::size_t t = 0; t < frames.size(); ++t)
      for (std::size_t v = 0; v < vocab.size(); ++v)
        logits[t * vocab.size() + v] = noise(rng) + (static_cast<int>(v) == frames[t] ? 6.0 : 0.0);
    const auto em = EmissionMatrix::from_logits(frames.size(), vocab, std::move(logits), 0.02);

    const auto result = force_align(em, tokens, sources);
    const double duration = static_cast<double>(frames.size()) * 0.02;
    std::printf("frames:     %zu (%.2f s)\n\n%-12s %-12s %8s %8s %8s\n", frames.size(), duration, "word", "latin",
                "start", "end", "score");
    for (std::size_t i = 0; i < result.words.size(); ++i) {
      const auto& w = result.words[i];
      std::printf("%-12s %-12s %8.3f %8.3f %8.4f\n", w.word.c_str(), tokens[i].c_str(), w.start_s, w.end_s, w.score);
    }
    std::printf("\nutterance score %.4f, longest gap %.3f s\n", result.score, longest_gap(result.words, duration));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "align_demo: %s\n", e.what());
    return 2;
  }
  return 0;
}
