// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-stage batch functions. Each takes a manifest (vector of records) and
// returns the surviving records plus structured rejects; the CLI subcommands
// and run_pipeline both call these.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lemas/aligner/ctc.hpp"
#include "lemas/aligner/emission.hpp"
#include "lemas/curate.hpp"
#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/pipeline/parallel.hpp"
#include "lemas/quality.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/textnorm/romanize.hpp"

namespace lemas {

struct Reject {
  std::string key;
  std::vector<std::string> reasons;
  std::string detail;
};

struct StageOutput {
  std::vector<UtteranceRecord> records;
  std::vector<Reject> rejects;
};

inline std::string reject_json_line(const Reject& r) {
  Json j;
  j["key"] = r.key;
  j["reasons"] = r.reasons;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

inline void write_rejects(const std::vector<Reject>& rejects, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : rejects) out << reject_json_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline void sort_by_key(std::vector<UtteranceRecord>& records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].key == records[i - 1].key) throw StageError("ingest", records[i].key, "duplicate key");
}

namespace stage_detail {

using Outcome = std::variant<UtteranceRecord, Reject>;

inline StageOutput collect(std::vector<Outcome> outcomes) {
  StageOutput out;
  for (auto& o : outcomes) {
    if (auto* r = std::get_if<UtteranceRecord>(&o))
      out.records.push_back(std::move(*r));
    else
      out.rejects.push_back(std::move(std::get<Reject>(o)));
  }
  return out;
}

}  // namespace stage_detail

// ---------------------------------------------------------------------------
// ingest

struct SourceInput {
  std::filesystem::path rows;  // JSONL of source-native rows
  SourceAdapterSpec adapter;
};

/// Adapted records from every source, sorted by key. Duplicate keys abort.
inline std::vector<UtteranceRecord> ingest(const std::vector<SourceInput>& sources) {
  std::vector<UtteranceRecord> records;
  for (const auto& src : sources) {
    src.adapter.check();
    std::ifstream in(src.rows, std::ios::binary);
    if (!in) throw IoError("cannot open " + src.rows.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      Json row;
      try {
        row = Json::parse(line);
      } catch (const Json::exception& e) {
        throw SchemaError(line_no, "<row>", std::string("invalid JSON: ") + e.what());
      }
      UtteranceRecord r;
      try {
        r = adapt(row, src.adapter);
      } catch (const DataError& e) {
        throw StageError("ingest", row.is_object() && row.contains("key") ? row["key"].dump() : "",
                         src.rows.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (const auto v = validate(r)) throw StageError("ingest", r.key, v->field + ": " + v->reason);
      records.push_back(std::move(r));
    }
  }
  sort_by_key(records);
  return records;
}

// ---------------------------------------------------------------------------
// normalize + romanize

struct NormalizeContext {
  const ProfileSet* profiles = nullptr;
  const Romanizer* romanizer = nullptr;
  RomanizeOptions romanize{};
};

/// Writes normalized_text and romanized_tokens. Unsupported languages, texts
/// with nothing left and unmappable characters become rejects.
inline StageOutput normalize_stage(const std::vector<UtteranceRecord>& in, const NormalizeContext& ctx,
                                   std::size_t workers = 1) {
  auto one = [&](std::size_t i) -> stage_detail::Outcome {
    UtteranceRecord r = in[i];
    const LanguageProfile* p = ctx.profiles->find(r.language);
    if (!p) return Reject{r.key, {"bad_language"}, "no profile for \"" + r.language + "\""};
    try {
      r.normalized_text = normalize(r.raw_text, *p);
      r.romanized_tokens = ctx.romanizer->romanize(r.normalized_text, r.language, ctx.romanize);
    } catch (const EmptyText& e) {
      return Reject{r.key, {"empty_text"}, e.what()};
    } catch (const UnknownCharacter& e) {
      return Reject{r.key, {"unmappable"}, e.what()};
    } catch (const DataError& e) {
      throw StageError("normalize", r.key, e.what());
    }
    if (r.romanized_tokens.empty()) return Reject{r.key, {"empty_text"}, "no romanizable words"};
    r.words.clear();
    r.avg_confidence.reset();
    return r;
  };
  return stage_detail::collect(parallel_map(in.size(), workers, one));
}

// ---------------------------------------------------------------------------
// align

struct AlignContext {
  const EmissionStore* store = nullptr;
  const Romanizer* romanizer = nullptr;
  RomanizeOptions romanize{};
  AlignOptions align{};
};

/// Word spans and confidence from per-key emissions. Span ends past the
/// recorded duration are clamped to it.
inline StageOutput align_stage(const std::vector<UtteranceRecord>& in, const AlignContext& ctx, std::size_t workers = 1) {
  auto one = [&](std::size_t i) -> stage_detail::Outcome {
    UtteranceRecord r = in[i];
    if (r.romanized_tokens.empty()) throw StageError("align", r.key, "record has no romanized tokens");
    if (!ctx.store->has(r.key)) return Reject{r.key, {"no_emissions"}, ""};

    std::vector<std::string> names;
    for (auto& w : ctx.romanizer->words(r.normalized_text, r.language, ctx.romanize)) names.push_back(w.source);
    if (names.size() != r.romanized_tokens.size()) names.clear();

    AlignmentResult res;
    try {
      const auto em = ctx.store->load(r.key);
      res = force_align(em, r.romanized_tokens, names, ctx.align);
    } catch (const InfeasibleAlignment& e) {
      return Reject{r.key, {"align_infeasible"}, e.what()};
    } catch (const UnknownCharacter& e) {
      return Reject{r.key, {"unknown_char"}, e.what()};
    } catch (const Error& e) {
      throw StageError("align", r.key, e.what());
    }

    for (auto& w : res.words) {
      w.start_s = quantize(w.start_s, kTimeDecimals);
      w.end_s = std::min(quantize(w.end_s, kTimeDecimals), r.duration_s);
      w.score = quantize(w.score, kScoreDecimals);
      if (!(w.start_s < w.end_s))
        return Reject{r.key, {"align_out_of_range"}, "word \"" + w.word + "\" starts at or after the recorded duration"};
    }
    r.words = std::move(res.words);
    r.avg_confidence = quantize(mean_word_score(r.words), kScoreDecimals);
    return r;
  };
  return stage_detail::collect(parallel_map(in.size(), workers, one));
}

// ---------------------------------------------------------------------------
// filter

inline StageOutput filter_stage(const std::vector<UtteranceRecord>& in, const FilterConfig& config,
                                std::size_t workers = 1) {
  auto one = [&](std::size_t i) -> stage_detail::Outcome {
    FilterVerdict v;
    try {
      v = run_chain(in[i], config);
    } catch (const DataError& e) {
      throw StageError("filter", in[i].key, e.what());
    }
    if (v.pass()) return in[i];
    Reject rej{in[i].key, {}, ""};
    for (auto reason : v.reasons) rej.reasons.push_back(reason_name(reason));
    return rej;
  };
  return stage_detail::collect(parallel_map(in.size(), workers, one));
}

// ---------------------------------------------------------------------------
// eval curation

struct EvalOutput {
  std::vector<UtteranceRecord> selected;  // trimmed, sorted by key
  std::vector<TrimInstruction> trims;     // for the selected records
  std::map<std::string, std::size_t> pool_sizes;
};

/// Trim, screen and select per language.
inline EvalOutput curate_eval(const std::vector<UtteranceRecord>& in, const EvalCriteria& c) {
  c.check();
  std::map<std::string, std::vector<UtteranceRecord>> pools;
  std::map<std::string, TrimInstruction> trims;
  for (const auto& r : in) {
    if (r.words.empty()) continue;
    auto t = trim_trailing_silence(r, c.trailing_silence_cap_s);
    if (!eligible(t.record, c).pass) continue;
    trims[r.key] = t.instruction;
    pools[r.language].push_back(std::move(t.record));
  }
  EvalOutput out;
  for (auto& [lang, pool] : pools) {
    out.pool_sizes[lang] = pool.size();
    for (auto& r : select_eval(pool, c)) out.selected.push_back(std::move(r));
  }
  std::sort(out.selected.begin(), out.selected.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  for (const auto& r : out.selected) out.trims.push_back(trims.at(r.key));
  return out;
}

inline std::string trim_json_line(const TrimInstruction& t) {
  Json j;
  j["key"] = t.key;
  j["audio_ref"] = t.audio_ref;
  j["end_s"] = quantize(t.end_s, kTimeDecimals);
  j["original_duration_s"] = quantize(t.original_duration_s, kTimeDecimals);
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

}  // namespace lemas
