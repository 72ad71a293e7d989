// SPDX-License-Identifier: Apache-2.0
//
// lemas: corpus curation command line. Data goes to files or stdout,
// progress and diagnostics to stderr.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 stage failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lemas/lemas.hpp"

namespace fs = std::filesystem;
using namespace lemas;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitStage = 3;

void note(const std::string& msg) { std::cerr << "[lemas] " << msg << '\n'; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::shared_ptr<ProfileSet> load_profiles(const std::string& dir) {
  return std::make_shared<ProfileSet>(ProfileSet::load_dir(dir.empty() ? profile_dir() : fs::path(dir)));
}

Romanizer load_romanizer(const std::string& dir) {
  return Romanizer::load(dir.empty() ? data_dir() / "tables" : fs::path(dir));
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> rows, adapters;
  std::string out;
};

int cmd_ingest(const IngestArgs& a) {
  if (a.rows.size() != a.adapters.size()) throw InvalidArgument("need one --adapter per --rows");
  std::vector<SourceInput> inputs;
  for (std::size_t i = 0; i < a.rows.size(); ++i) inputs.push_back({a.rows[i], SourceAdapterSpec::load(a.adapters[i])});
  auto records = ingest(inputs);
  write_manifest(records, a.out);
  note("ingest: " + std::to_string(records.size()) + " records -> " + a.out);
  return 0;
}

struct NormalizeArgs {
  std::string in, out, rejects, profiles, tables;
  bool split_han = false;
  std::size_t workers = 1;
};

int cmd_normalize(const NormalizeArgs& a) {
  const auto profiles = load_profiles(a.profiles);
  const auto romanizer = load_romanizer(a.tables);
  auto out = normalize_stage(read_manifest(a.in), {profiles.get(), &romanizer, {a.split_han}}, a.workers);
  write_manifest(out.records, a.out);
  if (!a.rejects.empty()) write_rejects(out.rejects, a.rejects);
  note("normalize: " + std::to_string(out.records.size()) + " kept, " + std::to_string(out.rejects.size()) + " rejected");
  return 0;
}

struct AlignArgs {
  std::string in, out, rejects, emissions, tables, word_score = "geometric";
  bool split_han = false;
  std::size_t workers = 1;
};

int cmd_align(const AlignArgs& a) {
  const EmissionStore store(a.emissions);
  const auto romanizer = load_romanizer(a.tables);
  AlignOptions opts;
  opts.score_mode = a.word_score == "arithmetic" ? WordScoreMode::Arithmetic : WordScoreMode::Geometric;
  auto out = align_stage(read_manifest(a.in), {&store, &romanizer, {a.split_han}, opts}, a.workers);
  write_manifest(out.records, a.out);
  if (!a.rejects.empty()) write_rejects(out.rejects, a.rejects);
  note("align: " + std::to_string(out.records.size()) + " kept, " + std::to_string(out.rejects.size()) + " rejected");
  return 0;
}

struct FilterArgs {
  std::string in, out, rejects, config, profiles;
  std::optional<double> threshold;
  std::size_t workers = 1;
};

int cmd_filter(const FilterArgs& a) {
  FilterConfig fc = a.config.empty() ? FilterConfig{} : FilterConfig::from_kv(KeyValueFile::load(a.config));
  if (a.threshold) fc.default_threshold = *a.threshold;
  fc.check();
  fc.profiles = load_profiles(a.profiles);
  auto out = filter_stage(read_manifest(a.in), fc, a.workers);
  write_manifest(out.records, a.out);
  write_rejects(out.rejects, a.rejects);
  note("filter: " + std::to_string(out.records.size()) + " passed, " + std::to_string(out.rejects.size()) + " rejected");
  return 0;
}

struct FitArgs {
  std::string in, language;
  double percentile = 1.0;
};

int cmd_fit_bounds(const FitArgs& a) {
  const auto records = read_manifest(a.in);
  const auto [lo, hi] = fit_ratio_bounds(records, a.language, a.percentile);
  std::cout << "min_ratio = " << fixed(lo, 6) << "\nmax_ratio = " << fixed(hi, 6) << '\n';
  return 0;
}

struct CurateArgs {
  std::string in, out, trim, review;
  std::size_t target = 500;
  double fraction = 0.2;
  uint64_t seed = 0;
};

int cmd_curate_eval(const CurateArgs& a) {
  EvalCriteria c;
  c.target_count = a.target;
  auto eval = curate_eval(read_manifest(a.in), c);
  write_manifest(eval.selected, a.out);
  std::string trims;
  for (const auto& t : eval.trims) trims += trim_json_line(t) + "\n";
  write_file(a.trim, trims);
  if (!a.review.empty()) {
    std::vector<std::string> keys;
    for (const auto& r : eval.selected) keys.push_back(r.key);
    std::string list;
    for (const auto& k : review_sample(keys, a.fraction, a.seed)) list += k + "\n";
    write_file(a.review, list);
  }
  for (const auto& [lang, n] : eval.pool_sizes) note("curate-eval: " + lang + " pool " + std::to_string(n));
  note("curate-eval: " + std::to_string(eval.selected.size()) + " selected");
  return 0;
}

struct StatsArgs {
  std::string in, unit = "hours", json;
};

int cmd_stats(const StatsArgs& a) {
  const auto table = compute_stats(read_manifest(a.in), a.unit == "minutes" ? DurationUnit::minutes : DurationUnit::hours);
  std::cout << render_stats_table(table);
  if (!a.json.empty()) write_file(a.json, stats_to_json(table).dump(2) + "\n");
  return 0;
}

struct ShardArgs {
  std::string in, out_dir;
  std::size_t n = 1;
};

int cmd_shard(const ShardArgs& a) {
  const auto records = read_manifest(a.in);
  const auto assignment = shard(records, a.n);
  fs::create_directories(a.out_dir);
  std::map<std::string, const UtteranceRecord*> by_key;
  for (const auto& r : records) by_key[r.key] = &r;
  for (std::size_t s = 0; s < a.n; ++s) {
    auto keys = assignment.keys[s];
    std::sort(keys.begin(), keys.end());
    std::vector<UtteranceRecord> part;
    for (const auto& k : keys) part.push_back(*by_key.at(k));
    char name[64];
    std::snprintf(name, sizeof name, "shard_%03zu.jsonl", s);
    write_manifest(part, (fs::path(a.out_dir) / name).string());
  }
  const auto report = shard_report(assignment).dump(2);
  write_file(fs::path(a.out_dir) / "shards.json", report + "\n");
  std::cout << report << '\n';
  return 0;
}

struct SchedArgs {
  double lambda = 5.0, gamma = 0.0;
  std::size_t steps = 32;
};

int cmd_sched_dump(const SchedArgs& a) {
  const flow::GuidanceParams g{a.lambda};
  const auto grid = flow::sway_grid(a.gamma, a.steps);
  std::cout << "k,s,t,g\n";
  char line[160];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(a.steps);
    std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g\n", k, s, grid[k], flow::cfg_strength(grid[k], g));
    std::cout << line;
  }
  return 0;
}

struct EditArgs {
  double avg_speed = 5.0, penalty = 0.0, delta = 1.0, max_rate = 0.0;
  int64_t mask_start = 0, mask_end = 0, expansion = 25;
  uint32_t max_rounds = 3;
  uint64_t tokens = 1;
  std::vector<std::string> outcomes;  // "frames" or "frames:flag"
};

int cmd_editsim(const EditArgs& a) {
  edit::RegenController c;
  c.avg_speed = a.avg_speed;
  c.max_rate = a.max_rate;
  c.max_rounds = a.max_rounds;
  c.mask_start = a.mask_start;
  c.mask_end = a.mask_end;
  c.penalty.repetition_penalty = a.penalty;
  c.expansion_frames = a.expansion;
  c.penalty_delta = a.delta;
  c.check();
  if (a.outcomes.empty()) throw InvalidArgument("editsim: give at least one --outcome");

  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    const auto& spec = a.outcomes[i];
    const auto colon = spec.find(':');
    edit::RegenOutcome o;
    o.generated_frames = static_cast<uint64_t>(parse_int(spec.substr(0, colon), "outcome frames"));
    o.re_gen_flag = colon != std::string::npos && spec.substr(colon + 1) == "1";
    o.target_tokens = a.tokens;
    const auto d = edit::regen_step(c, o);
    Json j;
    j["step"] = i;
    j["round"] = c.round;
    j["frames"] = o.generated_frames;
    j["re_gen_flag"] = o.re_gen_flag;
    j["short"] = edit::pathologically_short(c, o);
    j["action"] = edit::action_name(d.action);
    j["mask"] = {d.next.mask_start, d.next.mask_end};
    j["repetition_penalty"] = d.next.penalty.repetition_penalty;
    std::cout << j.dump() << '\n';
    if (d.action != edit::RegenAction::retry) return 0;
    c = d.next;
  }
  note("editsim: outcomes exhausted while retrying");
  return 0;
}

struct ChunkArgs {
  double duration = 0.0, max_chunk = 30.0, overlap = 2.0;
};

int cmd_chunk(const ChunkArgs& a) {
  Json arr = Json::array();
  for (const auto& c : edit::chunk(a.duration, a.max_chunk, a.overlap))
    arr.push_back({{"start_s", quantize(c.start_s, 6)}, {"end_s", quantize(c.end_s, 6)}});
  std::cout << arr.dump(2) << '\n';
  return 0;
}

struct StitchArgs {
  std::string chunks, out, plan;
};

// {"fade_s": 0.01, "format": "float32", "chunks": [{"wav": "a.wav"}, {"wav": "b.wav", "overlap_s": 2}]}
int cmd_stitch(const StitchArgs& a) {
  const auto spec = read_json_file(a.chunks);
  const fs::path base = fs::path(a.chunks).parent_path();
  if (!spec.contains("chunks") || !spec["chunks"].is_array() || spec["chunks"].empty())
    throw DataError(a.chunks + ": \"chunks\" must be a non-empty array");
  const double fade_s = spec.value("fade_s", 0.01);

  std::vector<std::vector<double>> segments;
  std::vector<std::size_t> overlaps;
  uint32_t sr = 0;
  edit::SampleFormat format = edit::SampleFormat::float32;
  for (std::size_t i = 0; i < spec["chunks"].size(); ++i) {
    const auto& c = spec["chunks"][i];
    fs::path p = c.at("wav").get<std::string>();
    if (p.is_relative()) p = base / p;
    auto wav = edit::read_wav(p);
    if (i == 0) {
      sr = wav.sample_rate;
      format = wav.format;
    } else {
      if (wav.sample_rate != sr) throw DataError(p.string() + ": sample rate differs from the first chunk");
      overlaps.push_back(static_cast<std::size_t>(std::llround(c.at("overlap_s").get<double>() * sr)));
    }
    segments.push_back(std::move(wav.samples));
  }
  if (const auto f = spec.find("format"); f != spec.end())
    format = f->get<std::string>() == "pcm16" ? edit::SampleFormat::pcm16 : edit::SampleFormat::float32;

  auto res = edit::stitch(segments, overlaps, sr, fade_s);
  edit::write_wav(a.out, {sr, format, res.samples});

  Json plan;
  plan["sample_rate"] = sr;
  plan["output_samples"] = res.samples.size();
  plan["fade_samples"] = res.plan.fade_samples;
  plan["segment_starts"] = res.plan.segment_starts;
  plan["splices"] = Json::array();
  for (const auto& s : res.plan.splices)
    plan["splices"].push_back({{"overlap_begin", s.overlap_begin},
                               {"overlap_len", s.overlap_len},
                               {"splice", s.splice},
                               {"fade_begin", s.fade_begin},
                               {"fallback", s.fallback}});
  const auto text = plan.dump(2) + "\n";
  if (a.plan.empty())
    std::cout << text;
  else
    write_file(a.plan, text);
  return 0;
}

int cmd_run(const std::string& config) {
  const auto summary = run_pipeline(PipelineConfig::load(config), &std::cerr);
  std::cout << summary.to_json().dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemas: multilingual speech corpus curation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lemas 0.1.0");
  int rc = 0;
  std::function<int()> action;

  IngestArgs ingest_a;
  auto* ingest = app.add_subcommand("ingest", "Adapt source-native rows into a canonical manifest");
  ingest->add_option("--rows", ingest_a.rows, "Source rows (JSONL); repeatable")->required()->check(CLI::ExistingFile);
  ingest->add_option("--adapter", ingest_a.adapters, "Adapter spec per --rows, in order")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", ingest_a.out, "Output manifest")->required();
  ingest->callback([&] { action = [&] { return cmd_ingest(ingest_a); }; });

  NormalizeArgs norm_a;
  auto* norm = app.add_subcommand("normalize", "Normalize and romanize transcripts");
  norm->add_option("-i,--in", norm_a.in, "Input manifest")->required()->check(CLI::ExistingFile);
  norm->add_option("-o,--out", norm_a.out, "Output manifest")->required();
  norm->add_option("--rejects", norm_a.rejects, "Reject report (JSONL)");
  norm->add_option("--profiles", norm_a.profiles, "Language profile directory (default: $LEMAS_PROFILE_DIR or data/profiles)");
  norm->add_option("--tables", norm_a.tables, "Transliteration table directory");
  norm->add_flag("--split-han", norm_a.split_han, "Treat each Han character as a word");
  norm->add_option("-j,--workers", norm_a.workers, "Worker threads")->check(CLI::PositiveNumber);
  norm->callback([&] { action = [&] { return cmd_normalize(norm_a); }; });

  AlignArgs align_a;
  auto* align = app.add_subcommand("align", "CTC forced alignment against stored emissions");
  align->add_option("-i,--in", align_a.in, "Normalized manifest")->required()->check(CLI::ExistingFile);
  align->add_option("-o,--out", align_a.out, "Output manifest")->required();
  align->add_option("--emissions", align_a.emissions, "Emission directory (<key>.emis or <key>.npy)")->required()->check(CLI::ExistingDirectory);
  align->add_option("--rejects", align_a.rejects, "Reject report (JSONL)");
  align->add_option("--tables", align_a.tables, "Transliteration table directory");
  align->add_option("--word-score", align_a.word_score, "Word score aggregation")->check(CLI::IsMember({"geometric", "arithmetic"}));
  align->add_flag("--split-han", align_a.split_han, "Treat each Han character as a word");
  align->add_option("-j,--workers", align_a.workers, "Worker threads")->check(CLI::PositiveNumber);
  align->callback([&] { action = [&] { return cmd_align(align_a); }; });

  FilterArgs filter_a;
  auto* filter = app.add_subcommand("filter", "Run the quality filter chain");
  filter->add_option("-i,--in", filter_a.in, "Aligned manifest")->required()->check(CLI::ExistingFile);
  filter->add_option("-o,--out", filter_a.out, "Passing records")->required();
  filter->add_option("--rejects", filter_a.rejects, "Reject report: one {key, reasons} per line")->required();
  filter->add_option("-c,--config", filter_a.config, "Filter configuration (key = value)")->check(CLI::ExistingFile);
  filter->add_option("--profiles", filter_a.profiles, "Language profile directory");
  filter->add_option("--threshold", filter_a.threshold, "Override the default confidence threshold");
  filter->add_option("-j,--workers", filter_a.workers, "Worker threads")->check(CLI::PositiveNumber);
  filter->callback([&] { action = [&] { return cmd_filter(filter_a); }; });

  FitArgs fit_a;
  auto* fit = app.add_subcommand("fit-bounds", "Fit speech-rate ratio bounds from a manifest");
  fit->add_option("-i,--in", fit_a.in, "Manifest")->required()->check(CLI::ExistingFile);
  fit->add_option("-l,--language", fit_a.language, "Language code")->required();
  fit->add_option("-p,--percentile", fit_a.percentile, "Lower percentile p; upper is 100-p")->check(CLI::Range(0.0, 50.0));
  fit->callback([&] { action = [&] { return cmd_fit_bounds(fit_a); }; });

  CurateArgs cur_a;
  auto* cur = app.add_subcommand("curate-eval", "Select the evaluation set");
  cur->add_option("-i,--in", cur_a.in, "Filtered manifest")->required()->check(CLI::ExistingFile);
  cur->add_option("-o,--out", cur_a.out, "Selected records")->required();
  cur->add_option("--trim", cur_a.trim, "Trim instructions (JSONL)")->required();
  cur->add_option("--review", cur_a.review, "Manual review sample (one key per line)");
  cur->add_option("--target", cur_a.target, "Records per language")->check(CLI::PositiveNumber);
  cur->add_option("--review-fraction", cur_a.fraction, "Review sample fraction")->check(CLI::Range(0.0, 1.0));
  cur->add_option("--seed", cur_a.seed, "Review sample seed");
  cur->callback([&] { action = [&] { return cmd_curate_eval(cur_a); }; });

  StatsArgs stats_a;
  auto* stats = app.add_subcommand("stats", "Per-language corpus statistics");
  stats->add_option("-i,--in", stats_a.in, "Manifest")->required()->check(CLI::ExistingFile);
  stats->add_option("--unit", stats_a.unit, "Total duration unit")->check(CLI::IsMember({"hours", "minutes"}));
  stats->add_option("--json", stats_a.json, "Also write JSON here");
  stats->callback([&] { action = [&] { return cmd_stats(stats_a); }; });

  ShardArgs shard_a;
  auto* shard_cmd = app.add_subcommand("shard", "Duration-balanced sharding");
  shard_cmd->add_option("-i,--in", shard_a.in, "Manifest")->required()->check(CLI::ExistingFile);
  shard_cmd->add_option("-n,--shards", shard_a.n, "Shard count")->required()->check(CLI::PositiveNumber);
  shard_cmd->add_option("-o,--out-dir", shard_a.out_dir, "Output directory")->required();
  shard_cmd->callback([&] { action = [&] { return cmd_shard(shard_a); }; });

  SchedArgs sched_a;
  auto* sched = app.add_subcommand("sched", "Flow sampling schedules");
  sched->require_subcommand(1);
  auto* dump = sched->add_subcommand("dump", "Print the sway grid and guidance strength as CSV");
  dump->add_option("--lambda", sched_a.lambda, "Guidance scale")->check(CLI::NonNegativeNumber);
  dump->add_option("--gamma", sched_a.gamma, "Sway curvature")->check(CLI::NonNegativeNumber);
  dump->add_option("--steps", sched_a.steps, "Step count K")->check(CLI::PositiveNumber);
  dump->callback([&] { action = [&] { return cmd_sched_dump(sched_a); }; });

  EditArgs edit_a;
  auto* editsim = app.add_subcommand("editsim", "Trace the re-generation controller over outcomes");
  editsim->add_option("--avg-speed", edit_a.avg_speed, "Frames per text token")->check(CLI::PositiveNumber);
  editsim->add_option("--tokens", edit_a.tokens, "Target text tokens")->check(CLI::PositiveNumber);
  editsim->add_option("--mask-start", edit_a.mask_start, "Mask start frame")->required();
  editsim->add_option("--mask-end", edit_a.mask_end, "Mask end frame")->required();
  editsim->add_option("--max-rounds", edit_a.max_rounds, "Retry limit");
  editsim->add_option("--expansion", edit_a.expansion, "Mask expansion per side, frames");
  editsim->add_option("--penalty", edit_a.penalty, "Initial repetition_penalty")->check(CLI::NonNegativeNumber);
  editsim->add_option("--delta", edit_a.delta, "Penalty increment per retry")->check(CLI::NonNegativeNumber);
  editsim->add_option("--max-rate", edit_a.max_rate, "Frame cap per token (0 = none)")->check(CLI::NonNegativeNumber);
  editsim->add_option("--outcome", edit_a.outcomes, "Generated frames, optionally :1 for the anomaly flag; repeatable")->required();
  editsim->callback([&] { action = [&] { return cmd_editsim(edit_a); }; });

  ChunkArgs chunk_a;
  auto* chunk_cmd = app.add_subcommand("chunk", "Chunk intervals for long-form synthesis");
  chunk_cmd->add_option("--duration", chunk_a.duration, "Total duration (s)")->required();
  chunk_cmd->add_option("--max", chunk_a.max_chunk, "Maximum chunk length (s)");
  chunk_cmd->add_option("--overlap", chunk_a.overlap, "Overlap between chunks (s)");
  chunk_cmd->callback([&] { action = [&] { return cmd_chunk(chunk_a); }; });

  StitchArgs stitch_a;
  auto* stitch_cmd = app.add_subcommand("stitch", "Join overlapping WAV chunks with zero-crossing cross-fades");
  stitch_cmd->add_option("--chunks", stitch_a.chunks, "Chunk list (JSON)")->required()->check(CLI::ExistingFile);
  stitch_cmd->add_option("-o,--out", stitch_a.out, "Output WAV")->required();
  stitch_cmd->add_option("--plan", stitch_a.plan, "Stitch plan JSON (default: stdout)");
  stitch_cmd->callback([&] { action = [&] { return cmd_stitch(stitch_a); }; });

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run the configured pipeline end to end");
  run->add_option("-c,--config", run_config, "Pipeline configuration (key = value)")->required()->check(CLI::ExistingFile);
  run->callback([&] { action = [&] { return cmd_run(run_config); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    rc = action ? action() : kExitUsage;
  } catch (const StageError& e) {
    std::cerr << "lemas: " << e.what() << '\n';
    return kExitStage;
  } catch (const InvalidArgument& e) {
    std::cerr << "lemas: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "lemas: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "lemas: " << e.what() << '\n';
    return kExitData;
  }
  return rc;
}
