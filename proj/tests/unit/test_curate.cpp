// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lemas/curate.hpp"
#include "test_support.hpp"

using namespace lemas;
using lemas::testing::aligned_record;
using lemas::testing::record;

namespace {

std::vector<std::string> nwords(std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

/// Records whose char_ratio is exactly `ratio` (one char per unit over 1 s).
UtteranceRecord ratio_record(const std::string& key, int chars, double duration_s = 1.0) {
  return record(key, "en", duration_s, std::string(static_cast<std::size_t>(chars), 'a'));
}

std::vector<std::string> keys_of(const std::vector<UtteranceRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.key);
  return out;
}

/// `count` unaligned records of one language whose durations sum to
/// `total_ms` and word counts sum to `total_words`, spread as evenly as
/// integers allow.
std::vector<UtteranceRecord> table_fixture(const std::string& lang, std::size_t count, int64_t total_ms,
                                           uint64_t total_words) {
  std::vector<UtteranceRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int64_t ms = total_ms / static_cast<int64_t>(count) + (static_cast<int64_t>(i) < total_ms % static_cast<int64_t>(count));
    const uint64_t w = total_words / count + (i < total_words % count);
    std::string text;
    for (uint64_t k = 0; k < w; ++k) text += lang == "zh" ? "字" : (k ? " word" : "word");
    char key[32];
    std::snprintf(key, sizeof key, "%s-%04zu", lang.c_str(), i);
    out.push_back(record(key, lang, static_cast<double>(ms) / 1000.0, text));
  }
  return out;
}

struct PublishedRow {
  const char* lang;
  double minutes;
  const char* avg_dur;
  uint64_t words;
  const char* avg_words;
};

// Evaluation-set statistics as published.
const PublishedRow kEvalTable[] = {
    {"it", 44.22, "5.31", 6599, "13.20"},  {"fr", 38.17, "4.58", 6546, "13.09"}, {"vi", 36.74, "4.41", 6727, "13.45"},
    {"pt", 41.69, "5.00", 5812, "11.62"},  {"de", 38.65, "4.64", 5599, "11.20"}, {"id", 47.20, "5.67", 6133, "12.27"},
    {"es", 40.52, "4.86", 6216, "12.43"},  {"ru", 40.24, "4.82", 5138, "10.28"}, {"en", 67.46, "8.10", 11325, "22.65"},
    {"zh", 75.84, "9.10", 18627, "37.25"},
};

}  // namespace

TEST(WordCount, PerLanguageRules) {
  EXPECT_EQ(word_count(aligned_record("a", "en", 5, nwords(7), 0.9)), 7u);
  EXPECT_EQ(word_count(record("b", "en", 5, "one two , three")), 3u);
  auto zh = aligned_record("c", "zh", 5, {"你好", "世界"}, 0.9);
  EXPECT_EQ(word_count(zh), 4u);
  EXPECT_EQ(word_count(record("d", "zh", 5, "你好，世界")), 4u);
}

TEST(TrimTrailingSilence, Examples) {
  auto r = aligned_record("t", "en", 5.0, {"a"}, 0.9, 3.0, 1.0);
  auto out = trim_trailing_silence(r);
  EXPECT_DOUBLE_EQ(out.record.duration_s, 4.2);
  EXPECT_EQ(out.instruction.key, "t");
  EXPECT_DOUBLE_EQ(out.instruction.end_s, 4.2);
  EXPECT_DOUBLE_EQ(out.instruction.original_duration_s, 5.0);

  r.duration_s = 4.1;
  EXPECT_DOUBLE_EQ(trim_trailing_silence(r).record.duration_s, 4.1);
  r.duration_s = 4.2;
  out = trim_trailing_silence(r);
  EXPECT_DOUBLE_EQ(out.record.duration_s, 4.2);
  EXPECT_DOUBLE_EQ(out.instruction.end_s, 4.2);

  r.words.clear();
  EXPECT_THROW(trim_trailing_silence(r), BadInput);
}

TEST(TrimTrailingSilence, NeverGrowsNorCutsLastWord) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> ms(1, 20000), lead(0, 5000);
  std::uniform_real_distribution<double> cap(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double start = lead(rng) / 1000.0, len = ms(rng) / 1000.0, tail = ms(rng) / 1000.0;
    auto r = quantized(aligned_record("k", "en", start + len + tail, {"w"}, 0.9, start, len));
    const auto out = trim_trailing_silence(r, cap(rng));
    EXPECT_LE(out.record.duration_s, r.duration_s);
    EXPECT_GE(out.record.duration_s, r.words.back().end_s);
    EXPECT_FALSE(validate(out.record)) << validate(out.record)->reason;
  }
}

TEST(Eligible, StrictAndInclusiveBounds) {
  auto r = aligned_record("e", "en", 5.0, nwords(10), 0.95);
  EXPECT_TRUE(eligible(r).pass);
  r.avg_confidence = 0.9;
  EXPECT_EQ(eligible(r).reason, "low_score");
  r.avg_confidence.reset();
  EXPECT_EQ(eligible(r).reason, "no_confidence");

  auto five = aligned_record("f", "en", 5.0, nwords(5), 0.95);
  EXPECT_EQ(eligible(five).reason, "too_few_words");
  EXPECT_TRUE(eligible(aligned_record("s", "en", 5.0, nwords(6), 0.95)).pass);

  for (double d : {3.0, 15.0}) EXPECT_TRUE(eligible(aligned_record("d", "en", d, nwords(6), 0.95, 0.0, 0.2)).pass);
  for (double d : {2.999, 15.001})
    EXPECT_EQ(eligible(aligned_record("d", "en", d, nwords(6), 0.95, 0.0, 0.2)).reason, "duration_out_of_window");
}

TEST(SelectEval, ClosestToMean) {
  std::vector<UtteranceRecord> pool = {ratio_record("a", 1), ratio_record("b", 2), ratio_record("c", 9)};
  EvalCriteria c;
  c.target_count = 2;
  EXPECT_EQ(keys_of(select_eval(pool, c)), (std::vector<std::string>{"a", "b"}));
  c.target_count = 1;
  EXPECT_EQ(keys_of(select_eval(pool, c)), std::vector<std::string>{"b"});
}

TEST(SelectEval, WholePoolWhenSmall) {
  std::vector<UtteranceRecord> pool;
  for (int i = 0; i < 500; ++i) pool.push_back(ratio_record("k" + std::to_string(1000 + i), 1 + i % 37));
  EXPECT_EQ(select_eval(pool).size(), 500u);
  pool.push_back(ratio_record("extra", 1000));
  const auto chosen = select_eval(pool);
  EXPECT_EQ(chosen.size(), 500u);
  EXPECT_EQ(std::count_if(chosen.begin(), chosen.end(), [](auto& r) { return r.key == "extra"; }), 0);
}

TEST(SelectEval, TieGoesToLowerKey) {
  // Mean is 5; "x" and "y" sit at distance 1 on either side.
  std::vector<UtteranceRecord> pool = {ratio_record("y", 6), ratio_record("x", 4), ratio_record("m", 5)};
  EvalCriteria c;
  c.target_count = 2;
  EXPECT_EQ(keys_of(select_eval(pool, c)), (std::vector<std::string>{"m", "x"}));
}

TEST(SelectEval, Errors) {
  std::vector<UtteranceRecord> none;
  EXPECT_THROW(select_eval(none), InsufficientData);
  std::vector<UtteranceRecord> mixed = {ratio_record("a", 1), record("b", "zh", 1.0, "你")};
  EXPECT_THROW(select_eval(mixed), InvalidArgument);
}

TEST(SelectEval, OptimalAndPermutationInvariant) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> size(1, 1000), chars(1, 60), target(1, 600), dur_ms(1000, 15000);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<UtteranceRecord> pool;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) pool.push_back(ratio_record("k" + std::to_string(i), chars(rng), dur_ms(rng) / 1000.0));
    EvalCriteria c;
    c.target_count = static_cast<std::size_t>(target(rng));
    const auto chosen = select_eval(pool, c);
    ASSERT_EQ(chosen.size(), std::min<std::size_t>(pool.size(), c.target_count));
    EXPECT_TRUE(std::is_sorted(chosen.begin(), chosen.end(), [](auto& a, auto& b) { return a.key < b.key; }));

    // Brute-force check: no unselected record is strictly closer than a selected one.
    long double sum = 0;
    for (const auto& r : pool) sum += char_ratio(rate_text(r), r.duration_s);
    const double mean = static_cast<double>(sum / pool.size());
    std::set<std::string> picked;
    double worst_in = 0.0;
    for (const auto& r : chosen) {
      picked.insert(r.key);
      worst_in = std::max(worst_in, std::fabs(char_ratio(rate_text(r), r.duration_s) - mean));
    }
    for (const auto& r : pool) {
      if (!picked.count(r.key)) {
        EXPECT_GE(std::fabs(char_ratio(rate_text(r), r.duration_s) - mean), worst_in - 1e-9);
      }
    }

    auto shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(select_eval(shuffled, c), chosen);
  }
}

TEST(ReviewSample, DeterministicFractionalSubset) {
  std::vector<std::string> keys;
  for (int i = 0; i < 500; ++i) keys.push_back("utt" + std::to_string(i));
  const auto a = review_sample(keys, 0.2, 1);
  EXPECT_EQ(a.size(), 100u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  for (const auto& k : a) EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end());
  auto shuffled = keys;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(2));
  EXPECT_EQ(review_sample(shuffled, 0.2, 1), a);
  EXPECT_NE(review_sample(keys, 0.2, 2), a);
  EXPECT_EQ(review_sample({"a", "b", "c"}, 0.2).size(), 1u);
  EXPECT_TRUE(review_sample({}, 0.2).empty());
}

TEST(Stats, ZhEvalRow) {
  // 400 x 9.101 s + 100 x 9.100 s, 127 x 38 + 373 x 37 characters.
  std::vector<UtteranceRecord> rs;
  for (int i = 0; i < 500; ++i) {
    const int chars = i < 127 ? 38 : 37;
    std::string text;
    for (int k = 0; k < chars; ++k) text += "字";
    rs.push_back(record("zh" + std::to_string(i), "zh", i < 400 ? 9.101 : 9.100, text));
  }
  const auto t = compute_stats(rs, DurationUnit::minutes);
  ASSERT_EQ(t.rows.size(), 1u);
  const auto& row = t.rows[0];
  EXPECT_EQ(row.sums.utterances, 500u);
  EXPECT_EQ(row.sums.total_words, 18627u);
  EXPECT_EQ(fixed(row.avg_words, 2), "37.25");
  EXPECT_EQ(fixed(row.avg_duration_s, 2), "9.10");
  EXPECT_EQ(fixed(row.total_duration, 2), "75.84");
}

TEST(Stats, EvalTotalsRow) {
  std::vector<UtteranceRecord> all;
  for (const auto& p : kEvalTable) {
    auto rs = table_fixture(p.lang, 500, std::llround(p.minutes * 60000.0), p.words);
    all.insert(all.end(), rs.begin(), rs.end());
  }
  const auto t = compute_stats(all, DurationUnit::minutes);
  EXPECT_EQ(t.total.sums.utterances, 5000u);
  EXPECT_EQ(t.total.sums.total_words, 78722u);
  EXPECT_EQ(fixed(t.total.avg_words, 2), "15.74");
  EXPECT_EQ(fixed(t.total.total_duration, 2), "470.73");
  EXPECT_EQ(fixed(t.total.avg_duration_s, 2), "5.65");

  ASSERT_EQ(t.rows.size(), 10u);
  for (const auto& p : kEvalTable) {
    const auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](auto& r) { return r.language == p.lang; });
    ASSERT_NE(it, t.rows.end());
    EXPECT_EQ(fixed(it->total_duration, 2), fixed(p.minutes, 2)) << p.lang;
    EXPECT_EQ(fixed(it->avg_words, 2), p.avg_words) << p.lang;
    // Two published rows round their average duration one unit off their
    // own total; allow one display unit.
    EXPECT_NEAR(it->avg_duration_s, std::stod(p.avg_dur), 0.01 + 1e-9) << p.lang;
  }
  // Rows ascend by total duration.
  EXPECT_EQ(t.rows.front().language, "vi");
  EXPECT_EQ(t.rows.back().language, "zh");
}

TEST(Stats, SelfConsistencyProperty) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> n(1, 300), ms(200, 30000), w(1, 40), lang(0, 9);
  for (int trial = 0; trial < 30; ++trial) {
    std::map<std::string, std::vector<UtteranceRecord>> by_lang;
    std::vector<UtteranceRecord> all;
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
      const std::string code(kSupportedLanguages[static_cast<std::size_t>(lang(rng))]);
      auto r = aligned_record("k" + std::to_string(i), code, ms(rng) / 1000.0, nwords(static_cast<std::size_t>(w(rng))), 0.9,
                              0.0, 0.001);
      all.push_back(r);
    }
    for (auto unit : {DurationUnit::hours, DurationUnit::minutes}) {
      const auto t = compute_stats(all, unit);
      auto rows = t.rows;
      rows.push_back(t.total);
      for (const auto& row : rows) {
        const double words = std::stod(fixed(row.avg_words, 2));
        const double dur = std::stod(fixed(row.avg_duration_s, 2));
        const double total_s = std::stod(fixed(row.total_duration, 2)) * unit_seconds(unit);
        const auto c = static_cast<double>(row.sums.utterances);
        EXPECT_LE(std::fabs(words - static_cast<double>(row.sums.total_words) / c), 0.005 + 1e-12);
        EXPECT_LE(std::fabs(dur - static_cast<double>(row.sums.total_ms) / 1000.0 / c), 0.005 + 1e-12);
        // The displayed total agrees with the exact sum to display precision.
        EXPECT_LE(std::fabs(total_s - static_cast<double>(row.sums.total_ms) / 1000.0), 0.005 * unit_seconds(unit) + 1e-9);
      }
    }
  }
}

TEST(Stats, ShardMergeEqualsWhole) {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> ms(200, 30000), w(1, 40), lang(0, 9), shard(0, 3);
  std::vector<UtteranceRecord> all;
  std::map<std::string, StatsAccumulator> merged;
  std::vector<std::map<std::string, StatsAccumulator>> shards(4);
  for (int i = 0; i < 1000; ++i) {
    const std::string code(kSupportedLanguages[static_cast<std::size_t>(lang(rng))]);
    all.push_back(aligned_record("k" + std::to_string(i), code, ms(rng) / 1000.0, nwords(static_cast<std::size_t>(w(rng))), 0.9,
                                 0.0, 0.001));
    shards[static_cast<std::size_t>(shard(rng))][code].add(all.back());
  }
  for (const auto& s : shards)
    for (const auto& [code, acc] : s) merged[code].merge(acc);
  EXPECT_EQ(stats_to_json(stats_from_sums(merged, DurationUnit::hours)).dump(),
            stats_to_json(compute_stats(all)).dump());
}

TEST(Stats, EmptyManifest) {
  const auto t = compute_stats({}, DurationUnit::hours);
  EXPECT_TRUE(t.rows.empty());
  EXPECT_EQ(t.total.sums.utterances, 0u);
  EXPECT_EQ(t.total.total_duration, 0.0);
  EXPECT_EQ(t.total.avg_words, 0.0);
  const auto text = render_stats_table(t);
  EXPECT_NE(text.find("total"), std::string::npos);
  EXPECT_NE(text.find("0.00"), std::string::npos);
}

TEST(Stats, RenderedLayout) {
  const auto rs = table_fixture("zh", 500, 4550400, 18627);
  const auto text = render_stats_table(compute_stats(rs, DurationUnit::minutes));
  EXPECT_EQ(text,
            "Language  Total Duration (min)  Avg. Duration (s)  Utterances  Total Words  Avg. Words\n"
            "zh                       75.84               9.10         500        18627       37.25\n"
            "total                    75.84               9.10         500        18627       37.25\n");
  const auto j = stats_to_json(compute_stats(rs, DurationUnit::minutes));
  EXPECT_EQ(j["unit"], "min");
  EXPECT_EQ(j["rows"][0]["total_ms"], 4550400);
  EXPECT_EQ(j["total"]["avg_words"], 37.25);
}
