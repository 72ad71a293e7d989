// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end orchestration. Stages hand over through manifests on disk; the
// outputs are a pure function of inputs and configuration.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "lemas/curate.hpp"
#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/pipeline/config.hpp"
#include "lemas/pipeline/shard.hpp"
#include "lemas/pipeline/stages.hpp"
#include "lemas/quality.hpp"

namespace lemas {

struct StageCount {
  std::string stage;
  std::size_t in = 0;
  std::size_t out = 0;
};

struct PipelineSummary {
  std::vector<StageCount> stages;
  std::map<std::string, std::size_t> filter_histogram;  // every filter reason, zero included
  std::map<std::string, std::map<std::string, std::size_t>> stage_rejections;
  std::size_t passed = 0;
  std::vector<std::string> outputs;  // relative to output_dir, in write order

  Json to_json() const {
    Json j;
    j["stages"] = Json::array();
    for (const auto& s : stages) j["stages"].push_back({{"stage", s.stage}, {"in", s.in}, {"out", s.out}});
    j["passed"] = passed;
    Json hist = Json::object();
    for (auto r : kAllReasons) hist[reason_name(r)] = filter_histogram.count(reason_name(r)) ? filter_histogram.at(reason_name(r)) : 0;
    j["rejections"] = hist;
    Json stage_rej = Json::object();
    for (const auto& [stage, counts] : stage_rejections) {
      Json c = Json::object();
      for (const auto& [reason, n] : counts) c[reason] = n;
      stage_rej[stage] = c;
    }
    j["stage_rejections"] = stage_rej;
    j["outputs"] = outputs;
    return j;
  }
};

namespace run_detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::map<std::string, std::size_t> histogram(const std::vector<Reject>& rejects) {
  std::map<std::string, std::size_t> h;
  for (const auto& r : rejects)
    for (const auto& reason : r.reasons) ++h[reason];
  return h;
}

}  // namespace run_detail

inline PipelineSummary run_pipeline(const PipelineConfig& cfg, std::ostream* progress = nullptr) {
  namespace fs = std::filesystem;
  cfg.check();
  fs::create_directories(cfg.output_dir);
  PipelineSummary summary;
  auto log = [&](const std::string& msg) {
    if (progress) *progress << "[lemas] " << msg << '\n';
  };
  auto write_stage = [&](const std::string& name, std::vector<UtteranceRecord>& records) {
    const auto path = cfg.output_dir / name;
    try {
      write_manifest(records, path.string());
    } catch (const ValidationError& e) {
      throw StageError(name, e.key(), e.reason());
    }
    summary.outputs.push_back(name);
  };
  auto write_rej = [&](const std::string& stage, const std::vector<Reject>& rejects) {
    const std::string name = stage + "_rejects.jsonl";
    write_rejects(rejects, cfg.output_dir / name);
    summary.outputs.push_back(name);
    summary.stage_rejections[stage] = run_detail::histogram(rejects);
  };

  // ingest
  std::vector<UtteranceRecord> records;
  if (cfg.input_manifest) {
    try {
      records = read_manifest(cfg.input_manifest->string());
    } catch (const SchemaError& e) {
      throw StageError("ingest", "", e.what());
    }
  }
  if (!cfg.sources.empty()) {
    std::vector<SourceInput> inputs;
    for (const auto& s : cfg.sources) {
      auto spec = SourceAdapterSpec::load(s.adapter.string());
      if (spec.source.empty()) spec.source = s.name;
      inputs.push_back({s.rows, std::move(spec)});
    }
    auto adapted = ingest(inputs);
    records.insert(records.end(), std::make_move_iterator(adapted.begin()), std::make_move_iterator(adapted.end()));
  }
  sort_by_key(records);
  summary.stages.push_back({"ingest", records.size(), records.size()});
  write_stage("01_ingest.jsonl", records);
  log("ingest: " + std::to_string(records.size()) + " records");

  std::shared_ptr<ProfileSet> profiles = std::make_shared<ProfileSet>(ProfileSet::load_dir(cfg.profiles_dir));
  std::unique_ptr<Romanizer> romanizer;
  if (cfg.stages.normalize || (cfg.stages.align && cfg.emissions_dir))
    romanizer = std::make_unique<Romanizer>(Romanizer::load(cfg.tables_dir));
  const RomanizeOptions ropts{cfg.split_han};

  if (cfg.stages.normalize) {
    auto out = normalize_stage(records, {profiles.get(), romanizer.get(), ropts}, cfg.workers);
    summary.stages.push_back({"normalize", records.size(), out.records.size()});
    records = std::move(out.records);
    write_stage("02_normalized.jsonl", records);
    write_rej("normalize", out.rejects);
    log("normalize: " + std::to_string(records.size()) + " kept, " + std::to_string(out.rejects.size()) + " rejected");
  }

  if (cfg.stages.align && cfg.emissions_dir) {
    const EmissionStore store(*cfg.emissions_dir);
    auto out = align_stage(records, {&store, romanizer.get(), ropts, cfg.align}, cfg.workers);
    summary.stages.push_back({"align", records.size(), out.records.size()});
    records = std::move(out.records);
    write_stage("03_aligned.jsonl", records);
    write_rej("align", out.rejects);
    log("align: " + std::to_string(records.size()) + " kept, " + std::to_string(out.rejects.size()) + " rejected");
  }

  if (cfg.stages.filter) {
    FilterConfig fc = cfg.filter;
    fc.profiles = profiles;
    auto out = filter_stage(records, fc, cfg.workers);
    summary.stages.push_back({"filter", records.size(), out.records.size()});
    summary.filter_histogram = run_detail::histogram(out.rejects);
    records = std::move(out.records);
    write_stage("04_filtered.jsonl", records);
    write_rejects(out.rejects, cfg.output_dir / "filter_rejects.jsonl");
    summary.outputs.push_back("filter_rejects.jsonl");
    log("filter: " + std::to_string(records.size()) + " passed, " + std::to_string(out.rejects.size()) + " rejected");
  }
  summary.passed = records.size();

  if (cfg.stages.stats) {
    const auto table = compute_stats(records, cfg.stats_unit);
    run_detail::write_text(cfg.output_dir / "stats.txt", render_stats_table(table));
    run_detail::write_text(cfg.output_dir / "stats.json", stats_to_json(table).dump(2) + "\n");
    summary.outputs.push_back("stats.txt");
    summary.outputs.push_back("stats.json");
  }

  if (cfg.stages.eval) {
    auto eval = curate_eval(records, cfg.eval);
    summary.stages.push_back({"eval", records.size(), eval.selected.size()});
    fs::create_directories(cfg.output_dir / "eval");
    write_stage("eval/eval.jsonl", eval.selected);
    std::string trims, review;
    for (const auto& t : eval.trims) trims += trim_json_line(t) + "\n";
    std::vector<std::string> keys;
    for (const auto& r : eval.selected) keys.push_back(r.key);
    for (const auto& k : review_sample(keys, cfg.review_fraction, cfg.review_seed)) review += k + "\n";
    run_detail::write_text(cfg.output_dir / "eval" / "trim.jsonl", trims);
    run_detail::write_text(cfg.output_dir / "eval" / "review.txt", review);
    summary.outputs.push_back("eval/trim.jsonl");
    summary.outputs.push_back("eval/review.txt");
    const auto table = compute_stats(eval.selected, DurationUnit::minutes);
    run_detail::write_text(cfg.output_dir / "eval" / "stats.txt", render_stats_table(table));
    summary.outputs.push_back("eval/stats.txt");
    log("eval: " + std::to_string(eval.selected.size()) + " selected");
  }

  if (cfg.stages.shard && cfg.shards > 1) {
    const auto assignment = shard(records, cfg.shards);
    fs::create_directories(cfg.output_dir / "shards");
    std::map<std::string, const UtteranceRecord*> by_key;
    for (const auto& r : records) by_key[r.key] = &r;
    for (std::size_t s = 0; s < cfg.shards; ++s) {
      std::vector<UtteranceRecord> part;
      auto keys = assignment.keys[s];
      std::sort(keys.begin(), keys.end());
      for (const auto& k : keys) part.push_back(*by_key.at(k));
      char name[64];
      std::snprintf(name, sizeof name, "shards/shard_%03zu.jsonl", s);
      write_stage(name, part);
    }
    run_detail::write_text(cfg.output_dir / "shards" / "shards.json", shard_report(assignment).dump(2) + "\n");
    summary.outputs.push_back("shards/shards.json");
    summary.stages.push_back({"shard", records.size(), records.size()});
  }

  summary.outputs.push_back("summary.json");
  run_detail::write_text(cfg.output_dir / "summary.json", summary.to_json().dump(2) + "\n");
  log("done: " + std::to_string(summary.passed) + " records passed");
  return summary;
}

}  // namespace lemas
