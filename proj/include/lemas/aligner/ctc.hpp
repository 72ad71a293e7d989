// SPDX-License-Identifier: Apache-2.0
#pragma once

// CTC forced alignment (Viterbi) over a blank-interleaved character trellis.
//
// States 0..2L: even states are blanks, state 2i+1 is label i. Transitions
// into state s come from s (stay), s-1 (advance) or s-2 (skip the blank
// between two different labels). Equal scores prefer advance, then stay,
// then skip; the final state prefers the trailing blank only when strictly
// better than the last label.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lemas/aligner/emission.hpp"
#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/util/unicode.hpp"

namespace lemas {

enum class WordScoreMode {
  /// exp(mean log-posterior) over the word's aligned frames.
  Geometric,
  /// mean posterior over the word's aligned frames.
  Arithmetic,
};

struct AlignOptions {
  WordScoreMode score_mode = WordScoreMode::Geometric;
};

struct AlignmentResult {
  std::vector<WordSpan> words;
  /// Vocab index emitted at each frame (0 = blank).
  std::vector<int> path;
  /// Trellis state at each frame.
  std::vector<int> states;
  /// Total log-probability of the chosen path.
  double log_prob = kNegInf;
  /// Utterance confidence (mean word score).
  double score = 0.0;
};

/// Vocab indices for the characters of `tokens`, plus the owning token of each.
struct LabelSequence {
  std::vector<int> labels;
  std::vector<std::size_t> owner;
};

inline LabelSequence make_labels(const EmissionMatrix& em, std::span<const std::string> tokens) {
  LabelSequence seq;
  for (std::size_t w = 0; w < tokens.size(); ++w) {
    const auto cps = unicode::decode_utf8(tokens[w]);
    if (cps.empty()) throw InvalidArgument("empty token at index " + std::to_string(w));
    for (char32_t cp : cps) {
      std::string ch;
      unicode::append_utf8(ch, cp);
      const auto idx = em.index_of(ch);
      if (!idx || *idx == 0)
        throw UnknownCharacter(cp, "character " + unicode::format_code_point(cp) + " not in emission vocab");
      seq.labels.push_back(*idx);
      seq.owner.push_back(w);
    }
  }
  if (seq.labels.empty()) throw InvalidArgument("nothing to align");
  return seq;
}

/// Minimum frame count: one per label plus a blank between repeats.
inline std::size_t min_frames(std::span<const int> labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

/// Best CTC path for `tokens`; `source_words` (same length) names the
/// resulting spans, defaulting to the tokens themselves.
inline AlignmentResult force_align(const EmissionMatrix& em, std::span<const std::string> tokens,
                                   std::span<const std::string> source_words = {}, const AlignOptions& opts = {}) {
  if (!source_words.empty() && source_words.size() != tokens.size())
    throw InvalidArgument("source word count does not match token count");
  const auto seq = make_labels(em, tokens);
  const auto& labels = seq.labels;
  const std::size_t T = em.frames();
  const std::size_t L = labels.size();
  const std::size_t S = 2 * L + 1;
  if (T < min_frames(labels))
    throw InfeasibleAlignment(std::to_string(L) + " labels need " + std::to_string(min_frames(labels)) +
                              " frames, have " + std::to_string(T));

  auto token_of = [&](std::size_t s) { return s % 2 == 0 ? 0 : labels[s / 2]; };

  std::vector<double> prev(S, kNegInf), cur(S, kNegInf);
  std::vector<int8_t> back(T * S, -1);
  prev[0] = em.at(0, 0);
  prev[1] = em.at(0, static_cast<std::size_t>(labels[0]));

  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double best = s >= 1 ? prev[s - 1] : kNegInf;
      int8_t from = 1;
      if (prev[s] > best) {
        best = prev[s];
        from = 0;
      }
      if (s % 2 == 1 && s >= 3 && labels[s / 2] != labels[s / 2 - 1] && prev[s - 2] > best) {
        best = prev[s - 2];
        from = 2;
      }
      if (best == kNegInf) {
        cur[s] = kNegInf;
        continue;
      }
      cur[s] = best + em.at(t, static_cast<std::size_t>(token_of(s)));
      back[t * S + s] = from;
    }
    std::swap(prev, cur);
  }

  std::size_t end = S - 2;
  if (prev[S - 1] > prev[S - 2]) end = S - 1;
  if (prev[end] == kNegInf) throw InfeasibleAlignment("every path has zero probability");

  AlignmentResult res;
  res.log_prob = prev[end];
  res.states.assign(T, 0);
  res.path.assign(T, 0);
  std::size_t s = end;
  for (std::size_t t = T; t-- > 0;) {
    res.states[t] = static_cast<int>(s);
    res.path[t] = token_of(s);
    if (t > 0) s -= static_cast<std::size_t>(back[t * S + s]);
  }

  const std::size_t W = tokens.size();
  std::vector<long> first(W, -1), last(W, -1);
  std::vector<double> log_sum(W, 0.0), prob_sum(W, 0.0);
  std::vector<std::size_t> count(W, 0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto st = static_cast<std::size_t>(res.states[t]);
    if (st % 2 == 0) continue;
    const std::size_t w = seq.owner[st / 2];
    if (first[w] < 0) first[w] = static_cast<long>(t);
    last[w] = static_cast<long>(t);
    const double lp = em.at(t, static_cast<std::size_t>(res.path[t]));
    log_sum[w] += lp;
    prob_sum[w] += std::exp(lp);
    ++count[w];
  }

  const double fd = em.frame_dur_s();
  res.words.reserve(W);
  for (std::size_t w = 0; w < W; ++w) {
    WordSpan span;
    span.word = source_words.empty() ? tokens[w] : source_words[w];
    span.start_s = static_cast<double>(first[w]) * fd;
    span.end_s = static_cast<double>(last[w] + 1) * fd;
    const double n = static_cast<double>(count[w]);
    span.score = opts.score_mode == WordScoreMode::Geometric ? std::exp(log_sum[w] / n) : prob_sum[w] / n;
    span.score = std::min(1.0, std::max(0.0, span.score));
    res.words.push_back(std::move(span));
  }
  res.score = mean_word_score(res.words);
  return res;
}

/// Utterance confidence: unweighted mean of word scores.
inline double score_utterance(const AlignmentResult& result) { return mean_word_score(result.words); }

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  double length() const { return end_s - start_s; }
  bool operator==(const Interval&) const = default;
};

/// Parts of [0, duration_s] not covered by any word span, merged.
inline std::vector<Interval> unaligned_gaps(std::span<const WordSpan> words, double duration_s) {
  std::vector<Interval> gaps;
  double cursor = 0.0;
  for (const auto& w : words) {
    if (w.start_s > cursor) gaps.push_back({cursor, w.start_s});
    cursor = std::max(cursor, w.end_s);
  }
  if (duration_s > cursor) gaps.push_back({cursor, duration_s});
  return gaps;
}

inline std::vector<Interval> unaligned_gaps(const AlignmentResult& result, double duration_s) {
  return unaligned_gaps(result.words, duration_s);
}

inline double longest_gap(std::span<const WordSpan> words, double duration_s) {
  double best = 0.0;
  for (const auto& g : unaligned_gaps(words, duration_s)) best = std::max(best, g.length());
  return best;
}

}  // namespace lemas
