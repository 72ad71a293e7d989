// SPDX-License-Identifier: Apache-2.0
#pragma once

// Synthetic corpora for pipeline-level tests: source-native rows in two
// schemas, adapter files, peaked CTC emissions and a pipeline config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lemas/aligner/emission.hpp"
#include "lemas/manifest.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/textnorm/romanize.hpp"
#include "test_support.hpp"

namespace lemas::testing {

inline constexpr double kFixtureFrameS = 0.02;

struct FixtureUtterance {
  std::string key;
  std::string language;
  std::string text;
  double peak = 0.95;                // posterior of the intended label
  std::size_t frames_per_char = 3;
  std::size_t lead_frames = 10;
  std::size_t tail_frames = 10;
  std::size_t gap_frames = 0;        // extra blanks after the first word
  bool emissions = true;
  double duration_s = 0.0;           // 0: derived from the emission length
};

/// Blank-interleaved frame labels for `tokens` under the fixture layout.
inline std::vector<int> fixture_frames(const std::vector<std::string>& tokens, const FixtureUtterance& u,
                                       const std::vector<std::string>& vocab) {
  auto index = [&](char c) {
    for (std::size_t v = 1; v < vocab.size(); ++v)
      if (vocab[v].size() == 1 && vocab[v][0] == c) return static_cast<int>(v);
    return 0;
  };
  std::vector<int> frames(u.lead_frames, 0);
  for (std::size_t w = 0; w < tokens.size(); ++w) {
    if (w > 0) frames.push_back(0);
    if (w == 1) frames.insert(frames.end(), u.gap_frames, 0);
    for (std::size_t c = 0; c < tokens[w].size(); ++c) {
      if (c > 0 && tokens[w][c] == tokens[w][c - 1]) frames.push_back(0);
      frames.insert(frames.end(), u.frames_per_char, index(tokens[w][c]));
    }
  }
  frames.insert(frames.end(), u.tail_frames, 0);
  return frames;
}

inline std::vector<std::string> fixture_vocab() {
  std::vector<std::string> v = {"<b>"};
  for (char c = 'a'; c <= 'z'; ++c) v.emplace_back(1, c);
  v.emplace_back("'");
  return v;
}

inline EmissionMatrix peaked_emissions(const std::vector<int>& frames, double peak, const std::vector<std::string>& vocab) {
  const std::size_t V = vocab.size();
  const double hit = std::log(peak), miss = std::log((1.0 - peak) / static_cast<double>(V - 1));
  std::vector<double> lp(frames.size() * V, miss);
  for (std::size_t t = 0; t < frames.size(); ++t) lp[t * V + static_cast<std::size_t>(frames[t])] = hit;
  return EmissionMatrix::from_logits(frames.size(), vocab, std::move(lp), kFixtureFrameS);
}

struct FixtureCorpus {
  std::filesystem::path root;
  std::filesystem::path config;
  std::vector<FixtureUtterance> utterances;
};

/// Writes rows (alternating between two source schemas), adapters,
/// emissions and `pipeline.conf` under `root`. `extra_config` is appended.
inline FixtureCorpus write_fixture_corpus(const std::filesystem::path& root, std::vector<FixtureUtterance> utts,
                                          const std::string& extra_config = "") {
  namespace fs = std::filesystem;
  fs::create_directories(root / "emissions");
  const auto profiles = ProfileSet::load_dir(profile_dir());
  const auto romanizer = Romanizer::load();
  const auto vocab = fixture_vocab();

  std::string rows_a, rows_b;
  for (auto& u : utts) {
    const auto* p = profiles.find(u.language);
    std::vector<std::string> tokens;
    if (p) {
      try {
        tokens = romanizer.romanize(normalize(u.text, *p), u.language);
      } catch (const DataError&) {
        tokens.clear();
      }
    }
    const auto frames = fixture_frames(tokens, u, vocab);
    if (u.duration_s == 0.0) u.duration_s = quantize(static_cast<double>(frames.size()) * kFixtureFrameS, kTimeDecimals);
    if (u.emissions && !tokens.empty())
      write_emission_text(peaked_emissions(frames, u.peak, vocab), root / "emissions" / (u.key + ".emis"));

    Json row;
    const bool first_schema = (&u - utts.data()) % 2 == 0;
    if (first_schema) {
      row["id"] = u.key;
      row["text"] = u.text;
      row["dur"] = u.duration_s;
      row["lang"] = u.language;
      row["path"] = "wav/" + u.key + ".wav";
      rows_a += row.dump(-1, ' ', false, Json::error_handler_t::strict) + "\n";
    } else {
      row["utt"] = u.key;
      row["transcript"] = u.text;
      row["seconds"] = fixed(u.duration_s, 3);
      row["language"] = u.language;
      row["file"] = "audio/" + u.key + ".wav";
      row["speaker"] = "spk" + std::to_string(u.key.size() % 3);
      rows_b += row.dump(-1, ' ', false, Json::error_handler_t::strict) + "\n";
    }
  }
  spit(root / "books.jsonl", rows_a);
  spit(root / "podcasts.jsonl", rows_b);
  spit(root / "books.adapter",
       "source = books\nmap.key = id\nmap.raw_text = text\nmap.duration_s = dur\nmap.language = lang\nmap.audio_ref = path\n");
  spit(root / "podcasts.adapter",
       "source = podcasts\nmap.key = utt\nmap.raw_text = transcript\nmap.duration_s = seconds\n"
       "map.language = language\nmap.audio_ref = file\n");
  spit(root / "pipeline.conf",
       "output_dir = out\n"
       "source.books.rows = books.jsonl\nsource.books.adapter = books.adapter\n"
       "source.podcasts.rows = podcasts.jsonl\nsource.podcasts.adapter = podcasts.adapter\n"
       "emissions_dir = emissions\n" +
           extra_config);
  return {root, root / "pipeline.conf", std::move(utts)};
}

/// Deterministic mixed corpus: mostly clean utterances plus a seeded share
/// of every failure mode the filters and stages detect.
inline std::vector<FixtureUtterance> mixed_utterances(std::size_t n, uint32_t seed) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> sentences = {
      {"en", {"the quick brown fox jumps over the lazy dog", "she sells sea shells by the sea shore today",
              "we will meet again at seven in the evening", "please read the next sentence out loud slowly"}},
      {"es", {"el perro corre por el parque cada mañana", "dónde está la estación de tren más cercana"}},
      {"ru", {"привет как дела у тебя сегодня утром", "мы пойдём гулять в парк после обеда"}},
      {"de", {"der schnelle braune fuchs springt über den zaun", "wir gehen morgen früh in die stadt"}},
      {"fr", {"le chat dort sur le canapé tout l'après midi", "nous allons au marché ce samedi matin"}},
      {"zh", {"今天天气很好，我们去公园散步吧", "他每天早上都喝一杯热茶"}},
  };
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> lang(0, sentences.size() - 1), mode(0, 19), fpc(3, 6), pad(5, 40);
  std::uniform_real_distribution<double> peak(0.93, 0.995);
  std::vector<FixtureUtterance> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [code, pool] = sentences[lang(rng)];
    FixtureUtterance u;
    char key[32];
    std::snprintf(key, sizeof key, "utt%05zu", i);
    u.key = key;
    u.language = code;
    u.text = pool[i % pool.size()];
    u.peak = peak(rng);
    u.frames_per_char = fpc(rng);
    u.lead_frames = pad(rng);
    u.tail_frames = pad(rng);
    switch (mode(rng)) {
      case 0: u.peak = 0.2; break;                                           // low confidence
      case 1: u.text = "hi", u.frames_per_char = 2, u.lead_frames = u.tail_frames = 3; break;  // too short
      case 2: u.gap_frames = 240; break;                                     // 4.8 s internal gap
      case 3: u.emissions = false; break;                                    // no emissions
      case 4: u.language = "ja"; break;                                      // unsupported language
      case 5: u.text += " 😀"; break;                                        // emoji
      case 6: u.duration_s = 0.3; u.lead_frames = u.tail_frames = 2; break;  // emissions outrun duration
      default: break;
    }
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace lemas::testing
