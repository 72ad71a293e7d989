// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lemas/aligner/ctc.hpp"
#include "lemas/aligner/emission.hpp"
#include "test_support.hpp"

using namespace lemas;
using lemas::testing::brute_force_best;
using lemas::testing::random_emission;

namespace {

const std::vector<std::string> kVocab = {"<b>", "a", "b", "c"};

/// Emission matrix from per-frame probability rows.
EmissionMatrix from_probs(const std::vector<std::vector<double>>& rows, std::vector<std::string> vocab,
                          double frame_dur = 0.02) {
  std::vector<double> lp;
  for (const auto& r : rows)
    for (double p : r) lp.push_back(p > 0 ? std::log(p) : kNegInf);
  return EmissionMatrix(rows.size(), std::move(vocab), std::move(lp), frame_dur);
}

std::string word_of(const std::vector<int>& labels) {
  std::string s;
  for (int l : labels) s += kVocab[static_cast<std::size_t>(l)];
  return s;
}

}  // namespace

TEST(EmissionMatrix, RejectsRowsThatAreNotDistributions) {
  EXPECT_THROW(EmissionMatrix(1, {"<b>", "a"}, {std::log(0.5), std::log(0.6)}, 0.02), DataError);
  EXPECT_NO_THROW(EmissionMatrix(1, {"<b>", "a"}, {std::log(0.5), std::log(0.5)}, 0.02));
  EXPECT_THROW(EmissionMatrix(0, {"<b>", "a"}, {}, 0.02), DataError);
  EXPECT_THROW(EmissionMatrix(1, {"<b>", "a"}, {0.0, kNegInf}, 0.0), DataError);
  EXPECT_THROW(EmissionMatrix(1, {"a", "a"}, {0.0, kNegInf}, 0.02), DataError);
}

TEST(EmissionMatrix, TextRoundTrip) {
  std::mt19937 rng(7);
  const auto em = random_emission(rng, 5, kVocab, 0.025);
  const auto dir = lemas::testing::scratch_dir("emis_text");
  write_emission_text(em, dir / "k.emis");
  const auto back = read_emission_text(dir / "k.emis");
  EXPECT_EQ(back.vocab(), em.vocab());
  EXPECT_EQ(back.data(), em.data());
  EXPECT_DOUBLE_EQ(back.frame_dur_s(), 0.025);
}

TEST(EmissionMatrix, NpyStoreRoundTrip) {
  std::mt19937 rng(8);
  const auto em = random_emission(rng, 6, kVocab, 0.02);
  const auto dir = lemas::testing::scratch_dir("emis_npy");
  write_npy(dir / "utt1.npy", em.frames(), em.vocab_size(), em.data());
  lemas::testing::spit(dir / "emissions.meta", "frame_dur_s = 0.02\nvocab = <b> a b c\n");
  const EmissionStore store(dir);
  ASSERT_TRUE(store.has("utt1"));
  EXPECT_FALSE(store.has("utt2"));
  const auto back = store.load("utt1");
  EXPECT_EQ(back.data(), em.data());
  EXPECT_EQ(back.vocab(), kVocab);
}

TEST(ForceAlign, SingleFrame) {
  const auto em = from_probs({{0.1, 0.9}}, {"<b>", "a"}, 0.02);
  const std::vector<std::string> tokens = {"a"};
  const auto res = force_align(em, tokens);
  ASSERT_EQ(res.words.size(), 1u);
  EXPECT_DOUBLE_EQ(res.words[0].start_s, 0.0);
  EXPECT_DOUBLE_EQ(res.words[0].end_s, 0.02);
  EXPECT_NEAR(res.words[0].score, 0.9, 1e-12);
  EXPECT_NEAR(res.score, 0.9, 1e-12);
}

TEST(ForceAlign, PeakedThreeFrames) {
  // a at frame 0, b at frame 2; frame 1 prefers blank.
  const auto em = from_probs({{0.05, 0.9, 0.05}, {0.6, 0.3, 0.1}, {0.05, 0.05, 0.9}}, {"<b>", "a", "b"});
  const std::vector<std::string> tokens = {"ab"};
  const auto res = force_align(em, tokens);
  EXPECT_EQ(res.path, (std::vector<int>{1, 0, 2}));
  EXPECT_NEAR(res.log_prob, std::log(0.9) + std::log(0.6) + std::log(0.9), 1e-12);
  EXPECT_NEAR(res.log_prob, brute_force_best(em, {1, 2}), 1e-12);
  EXPECT_DOUBLE_EQ(res.words[0].start_s, 0.0);
  EXPECT_NEAR(res.words[0].end_s, 0.06, 1e-12);

  // With frame 1 favouring a, the self-loop wins instead.
  const auto em2 = from_probs({{0.05, 0.9, 0.05}, {0.3, 0.6, 0.1}, {0.05, 0.05, 0.9}}, {"<b>", "a", "b"});
  EXPECT_EQ(force_align(em2, tokens).path, (std::vector<int>{1, 1, 2}));
}

TEST(ForceAlign, InfeasibleWhenTooFewFrames) {
  std::mt19937 rng(1);
  const auto em = random_emission(rng, 2, kVocab);
  const std::vector<std::string> abc = {"abc"};
  EXPECT_THROW(force_align(em, abc), InfeasibleAlignment);
  // A repeat needs a blank in between: "aa" cannot fit in 2 frames.
  const auto em3 = random_emission(rng, 2, kVocab);
  const std::vector<std::string> aa = {"aa"};
  EXPECT_THROW(force_align(em3, aa), InfeasibleAlignment);
  const auto em4 = random_emission(rng, 3, kVocab);
  EXPECT_NO_THROW(force_align(em4, aa));
}

TEST(ForceAlign, ZeroProbabilityEverywhereIsInfeasible) {
  const auto em = from_probs({{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, {"<b>", "a", "b"});
  const std::vector<std::string> tokens = {"a"};
  EXPECT_THROW(force_align(em, tokens), InfeasibleAlignment);
}

TEST(ForceAlign, UnknownCharacter) {
  std::mt19937 rng(2);
  const auto em = random_emission(rng, 4, kVocab);
  const std::vector<std::string> tokens = {"ax"};
  EXPECT_THROW(force_align(em, tokens), UnknownCharacter);
  const std::vector<std::string> blank = {"<b>"};
  EXPECT_THROW(force_align(em, blank), UnknownCharacter);
}

TEST(ForceAlign, MatchesBruteForceOracle) {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<std::size_t> tdist(1, 8), vdist(2, 4), ldist(1, 3);
  int checked = 0;
  for (int c = 0; c < 300; ++c) {
    const std::size_t V = vdist(rng);
    const std::vector<std::string> vocab(kVocab.begin(), kVocab.begin() + static_cast<std::ptrdiff_t>(V));
    const auto em = random_emission(rng, tdist(rng), vocab);
    std::uniform_int_distribution<int> lab(1, static_cast<int>(V) - 1);
    std::vector<int> labels(ldist(rng));
    for (auto& l : labels) l = lab(rng);
    const std::vector<std::string> tokens = {word_of(labels)};
    const double oracle = brute_force_best(em, labels);
    if (em.frames() < min_frames(labels)) {
      EXPECT_EQ(oracle, kNegInf);
      EXPECT_THROW(force_align(em, tokens), InfeasibleAlignment);
      continue;
    }
    const auto res = force_align(em, tokens);
    EXPECT_NEAR(res.log_prob, oracle, 1e-9);
    // The reported path scores its own log-probability and collapses to the labels.
    double lp = 0.0;
    for (std::size_t t = 0; t < em.frames(); ++t) lp += em.at(t, static_cast<std::size_t>(res.path[t]));
    EXPECT_NEAR(lp, res.log_prob, 1e-12);
    EXPECT_EQ(lemas::testing::ctc_collapse(res.path), labels);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(ForceAlign, PathIsMonotoneAndScoresBounded) {
  std::mt19937 rng(99);
  for (int c = 0; c < 200; ++c) {
    const auto em = random_emission(rng, 30, kVocab, 0.02, 2.0);
    const std::vector<std::string> tokens = {"ab", "cab", "a"};
    const auto res = force_align(em, tokens);
    for (std::size_t t = 1; t < res.states.size(); ++t) {
      const int d = res.states[t] - res.states[t - 1];
      EXPECT_TRUE(d >= 0 && d <= 2);
    }
    EXPECT_LE(res.states.front(), 1);
    EXPECT_GE(res.states.back(), static_cast<int>(2 * 6 + 1) - 2);
    double prev_end = 0.0;
    for (const auto& w : res.words) {
      EXPECT_GE(w.score, 0.0);
      EXPECT_LE(w.score, 1.0);
      EXPECT_GE(w.start_s, prev_end - 1e-12);
      EXPECT_LT(w.start_s, w.end_s);
      EXPECT_LE(w.end_s, em.duration_s() + 1e-12);
      prev_end = w.end_s;
    }
    EXPECT_GE(res.score, 0.0);
    EXPECT_LE(res.score, 1.0);
  }
}

TEST(ForceAlign, OneHotEmissionsScoreOne) {
  // Frames: a a <b> b c ; one-hot on that path.
  const std::vector<int> truth = {1, 1, 0, 2, 3};
  std::vector<std::vector<double>> rows;
  for (int v : truth) {
    std::vector<double> r(4, 0.0);
    r[static_cast<std::size_t>(v)] = 1.0;
    rows.push_back(r);
  }
  const auto em = from_probs(rows, kVocab);
  const std::vector<std::string> tokens = {"ab", "c"};
  const auto res = force_align(em, tokens);
  EXPECT_EQ(res.path, truth);
  EXPECT_DOUBLE_EQ(res.words[0].score, 1.0);
  EXPECT_DOUBLE_EQ(res.words[1].score, 1.0);
  EXPECT_DOUBLE_EQ(res.score, 1.0);
}

TEST(ForceAlign, ShiftInvariance) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int c = 0; c < 100; ++c) {
    const std::size_t T = 12;
    std::vector<double> logits(T * 4);
    for (auto& x : logits) x = n(rng);
    auto shifted = logits;
    for (auto& x : shifted) x += 3.75;
    const std::vector<std::string> tokens = {"abc", "ba"};
    const auto a = force_align(EmissionMatrix::from_logits(T, kVocab, logits, 0.02), tokens);
    const auto b = force_align(EmissionMatrix::from_logits(T, kVocab, shifted, 0.02), tokens);
    EXPECT_EQ(a.path, b.path);
  }
}

TEST(ForceAlign, WordSpansUseSourceNames) {
  std::mt19937 rng(3);
  const auto em = random_emission(rng, 10, kVocab);
  const std::vector<std::string> tokens = {"ab", "c"};
  const std::vector<std::string> names = {"äb", "ç"};
  const auto res = force_align(em, tokens, names);
  EXPECT_EQ(res.words[0].word, "äb");
  EXPECT_EQ(res.words[1].word, "ç");
  const std::vector<std::string> wrong = {"x"};
  EXPECT_THROW(force_align(em, tokens, wrong), InvalidArgument);
}

TEST(ForceAlign, ArithmeticModeIsAtLeastGeometric) {
  std::mt19937 rng(4);
  for (int c = 0; c < 50; ++c) {
    const auto em = random_emission(rng, 16, kVocab);
    const std::vector<std::string> tokens = {"abc", "cb"};
    AlignOptions arith;
    arith.score_mode = WordScoreMode::Arithmetic;
    const auto g = force_align(em, tokens);
    const auto a = force_align(em, tokens, {}, arith);
    ASSERT_EQ(g.path, a.path);
    for (std::size_t w = 0; w < g.words.size(); ++w) EXPECT_GE(a.words[w].score + 1e-12, g.words[w].score);
  }
}

TEST(ScoreUtterance, MeanOfWordScores) {
  AlignmentResult r;
  r.words = {{"a", 0, 1, 0.8}};
  EXPECT_DOUBLE_EQ(score_utterance(r), 0.8);
  r.words = {{"a", 0, 1, 0.6}, {"b", 1, 2, 1.0}};
  EXPECT_DOUBLE_EQ(score_utterance(r), 0.8);
  r.words = {{"a", 0, 1, 0.7}, {"b", 1, 2, 0.7}, {"c", 2, 3, 0.7}};
  EXPECT_NEAR(score_utterance(r), 0.7, 1e-15);
  r.words.clear();
  EXPECT_THROW(score_utterance(r), BadInput);
}

TEST(UnalignedGaps, Complement) {
  std::vector<WordSpan> tiling = {{"a", 0, 1.5, 1}, {"b", 1.5, 3, 1}};
  EXPECT_TRUE(unaligned_gaps(tiling, 3.0).empty());

  std::vector<WordSpan> one = {{"a", 1, 2, 1}};
  EXPECT_EQ(unaligned_gaps(one, 3.0), (std::vector<Interval>{{0, 1}, {2, 3}}));

  std::vector<WordSpan> two = {{"a", 0, 1, 1}, {"b", 5.5, 6, 1}};
  const auto gaps = unaligned_gaps(two, 6.0);
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_DOUBLE_EQ(gaps[0].length(), 4.5);
  EXPECT_DOUBLE_EQ(longest_gap(two, 6.0), 4.5);

  std::vector<WordSpan> none;
  EXPECT_EQ(unaligned_gaps(none, 2.0), (std::vector<Interval>{{0, 2}}));
}
