// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lemas/aligner/ctc.hpp"
#include "lemas/curate.hpp"
#include "lemas/error.hpp"
#include "lemas/quality.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/util/kvfile.hpp"

namespace lemas {

struct StageToggles {
  bool normalize = true;
  bool align = true;  // only runs when emissions_dir is set
  bool filter = true;
  bool stats = true;
  bool eval = false;
  bool shard = true;  // only runs when shards > 1
};

struct SourceEntry {
  std::string name;
  std::filesystem::path rows;
  std::filesystem::path adapter;
};

/// Pipeline configuration. Relative paths are resolved against the
/// directory of the configuration file.
///
///   output_dir = out
///   input_manifest = corpus.jsonl            # canonical records, or
///   source.<name>.rows = rows.jsonl          # source-native rows plus
///   source.<name>.adapter = name.adapter     # their field mapping
///   profiles_dir / tables_dir / emissions_dir
///   shards = 1, workers = 1
///   stage.<normalize|align|filter|stats|eval|shard> = true|false
///   align.word_score = geometric|arithmetic
///   romanize.split_han = false
///   stats.unit = hours|minutes
///   filter.*  (see FilterConfig::from_kv)
///   eval.min_word_score, eval.min_words, eval.min_dur_s, eval.max_dur_s,
///   eval.trailing_silence_cap_s, eval.target_count,
///   eval.review_fraction, eval.review_seed
struct PipelineConfig {
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> input_manifest;
  std::vector<SourceEntry> sources;
  std::filesystem::path profiles_dir = profile_dir();
  std::filesystem::path tables_dir = data_dir() / "tables";
  std::optional<std::filesystem::path> emissions_dir;
  std::size_t shards = 1;
  std::size_t workers = 1;
  StageToggles stages;
  AlignOptions align;
  bool split_han = false;
  DurationUnit stats_unit = DurationUnit::hours;
  FilterConfig filter;
  EvalCriteria eval;
  double review_fraction = 0.2;
  uint64_t review_seed = 0;

  void check() const {
    namespace fs = std::filesystem;
    if (output_dir.empty()) throw DataError("config: output_dir is required");
    if (!input_manifest && sources.empty()) throw DataError("config: need input_manifest or at least one source");
    if (input_manifest && !fs::exists(*input_manifest))
      throw DataError("config: input_manifest not found: " + input_manifest->string());
    for (const auto& s : sources) {
      if (!fs::exists(s.rows)) throw DataError("config: source." + s.name + ".rows not found: " + s.rows.string());
      if (!fs::exists(s.adapter))
        throw DataError("config: source." + s.name + ".adapter not found: " + s.adapter.string());
    }
    if (!fs::is_directory(profiles_dir)) throw DataError("config: profiles_dir not found: " + profiles_dir.string());
    if (stages.normalize && !fs::is_directory(tables_dir))
      throw DataError("config: tables_dir not found: " + tables_dir.string());
    if (emissions_dir && !fs::is_directory(*emissions_dir))
      throw DataError("config: emissions_dir not found: " + emissions_dir->string());
    if (shards == 0) throw DataError("config: shards must be at least 1");
    if (workers == 0) throw DataError("config: workers must be at least 1");
    if (!(review_fraction >= 0.0 && review_fraction <= 1.0)) throw DataError("config: review_fraction must lie in [0, 1]");
    filter.check();
    eval.check();
  }

  static PipelineConfig from_kv(const KeyValueFile& kv, const std::filesystem::path& base) {
    auto path = [&](const std::string& v) {
      std::filesystem::path p(v);
      return p.is_absolute() ? p : base / p;
    };
    PipelineConfig c;
    c.output_dir = path(kv.require("output_dir"));
    if (auto v = kv.get("input_manifest")) c.input_manifest = path(*v);

    std::map<std::string, SourceEntry> sources;
    for (const auto& [rest, value] : kv.with_prefix("source.")) {
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos) throw DataError("config: source." + rest + ": expected source.<name>.rows|adapter");
      auto& e = sources[rest.substr(0, dot)];
      e.name = rest.substr(0, dot);
      const auto field = rest.substr(dot + 1);
      if (field == "rows")
        e.rows = path(value);
      else if (field == "adapter")
        e.adapter = path(value);
      else
        throw DataError("config: unknown source field \"" + field + "\"");
    }
    for (auto& [name, e] : sources) {
      if (e.rows.empty() || e.adapter.empty()) throw DataError("config: source." + name + " needs rows and adapter");
      c.sources.push_back(std::move(e));
    }

    if (auto v = kv.get("profiles_dir")) c.profiles_dir = path(*v);
    if (auto v = kv.get("tables_dir")) c.tables_dir = path(*v);
    if (auto v = kv.get("emissions_dir")) c.emissions_dir = path(*v);
    const auto count = [&](const char* key, long long fallback) {
      const long long n = kv.get_int(key, fallback);
      if (n < 1) throw DataError(std::string("config: ") + key + " must be at least 1");
      return static_cast<std::size_t>(n);
    };
    c.shards = count("shards", 1);
    c.workers = count("workers", 1);

    c.stages.normalize = kv.get_bool("stage.normalize", c.stages.normalize);
    c.stages.align = kv.get_bool("stage.align", c.stages.align);
    c.stages.filter = kv.get_bool("stage.filter", c.stages.filter);
    c.stages.stats = kv.get_bool("stage.stats", c.stages.stats);
    c.stages.eval = kv.get_bool("stage.eval", c.stages.eval);
    c.stages.shard = kv.get_bool("stage.shard", c.stages.shard);

    if (auto v = kv.get("align.word_score")) {
      if (*v == "geometric")
        c.align.score_mode = WordScoreMode::Geometric;
      else if (*v == "arithmetic")
        c.align.score_mode = WordScoreMode::Arithmetic;
      else
        throw DataError("config: align.word_score must be geometric or arithmetic");
    }
    c.split_han = kv.get_bool("romanize.split_han", c.split_han);
    if (auto v = kv.get("stats.unit")) {
      if (*v == "hours")
        c.stats_unit = DurationUnit::hours;
      else if (*v == "minutes")
        c.stats_unit = DurationUnit::minutes;
      else
        throw DataError("config: stats.unit must be hours or minutes");
    }

    c.filter = FilterConfig::from_kv(kv, "filter.");
    c.eval.min_word_score = kv.get_double("eval.min_word_score", c.eval.min_word_score);
    c.eval.min_words = static_cast<std::size_t>(kv.get_int("eval.min_words", static_cast<long long>(c.eval.min_words)));
    c.eval.min_dur_s = kv.get_double("eval.min_dur_s", c.eval.min_dur_s);
    c.eval.max_dur_s = kv.get_double("eval.max_dur_s", c.eval.max_dur_s);
    c.eval.trailing_silence_cap_s = kv.get_double("eval.trailing_silence_cap_s", c.eval.trailing_silence_cap_s);
    c.eval.target_count =
        static_cast<std::size_t>(kv.get_int("eval.target_count", static_cast<long long>(c.eval.target_count)));
    c.review_fraction = kv.get_double("eval.review_fraction", c.review_fraction);
    c.review_seed = static_cast<uint64_t>(kv.get_int("eval.review_seed", 0));
    return c;
  }

  static PipelineConfig load(const std::filesystem::path& file) {
    auto c = from_kv(KeyValueFile::load(file.string()), file.parent_path());
    c.check();
    return c;
  }
};

}  // namespace lemas
