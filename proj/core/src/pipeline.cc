// Copyright 2026 The tqforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tqforge/pipeline.h"

#include <fstream>
#include <functional>
#include <sstream>

#include "tqforge/lexical.h"
#include "tqforge/stats.h"
#include "tqforge/text.h"

namespace tqforge {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFilePrefix = "file:";

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string resolve_spec(const fs::path& base, const std::string& spec) {
  if (spec.rfind(kFilePrefix, 0) != 0) return spec;
  return std::string(kFilePrefix) + resolve(base, spec.substr(kFilePrefix.size())).string();
}

std::size_t get_size(const Json& obj, std::string_view key) {
  const long long v = require_int(obj, key);
  if (v < 0) throw ConfigError("'" + std::string(key) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_hash(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

}  // namespace

PipelineConfig pipeline_config_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("pipeline config is not an object");
  PipelineConfig c;
  try {
    check_keys(j, {"tables", "documents", "templates", "supervised", "work_dir", "output", "seed",
                   "retrieval", "masking", "sql", "selftrain", "mixture"});
    c.tables = resolve(base_dir, require_string(j, "tables"));
    c.documents = resolve(base_dir, require_string(j, "documents"));
    c.templates = resolve(base_dir, require_string(j, "templates"));
    if (j.contains("supervised")) c.supervised = resolve(base_dir, require_string(j, "supervised"));
    c.work_dir = resolve(base_dir, j.contains("work_dir") ? require_string(j, "work_dir") : "work");
    if (j.contains("output")) c.output = resolve(base_dir, require_string(j, "output"));
    if (j.contains("seed")) {
      const long long seed = require_int(j, "seed");
      if (seed < 0) throw ConfigError("seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(seed);
    }
    if (j.contains("retrieval")) {
      const Json& r = j["retrieval"];
      check_keys(r, {"method", "tau", "provider"});
      if (r.contains("method")) c.retrieval.method = parse_method(require_string(r, "method"));
      if (r.contains("tau")) c.retrieval.tau = require_number(r, "tau");
      if (r.contains("provider")) c.retrieval.provider = resolve_spec(base_dir, require_string(r, "provider"));
    }
    if (j.contains("masking")) {
      const Json& m = j["masking"];
      check_keys(m, {"strategy", "rate"});
      if (m.contains("strategy")) c.masking.strategy = parse_strategy(require_string(m, "strategy"));
      if (m.contains("rate")) c.masking.rate = require_number(m, "rate");
      if (!(c.masking.rate > 0.0 && c.masking.rate <= 1.0)) throw ConfigError("mask rate must be in (0, 1]");
    }
    if (j.contains("sql")) {
      const Json& s = j["sql"];
      check_keys(s, {"count", "max_answers", "max_limit", "attempts_per_record"});
      if (s.contains("count")) c.sql_count = get_size(s, "count");
      if (s.contains("max_answers")) c.sampler.max_answers = get_size(s, "max_answers");
      if (s.contains("max_limit")) c.sampler.max_limit = static_cast<long long>(get_size(s, "max_limit"));
      if (s.contains("attempts_per_record")) c.sampler.attempts_per_record = get_size(s, "attempts_per_record");
      if (c.sampler.max_limit < 1) throw ConfigError("max_limit must be at least 1");
    }
    if (j.contains("selftrain")) {
      const Json& s = j["selftrain"];
      check_keys(s, {"criterion", "beam", "k", "generator", "verifier"});
      if (s.contains("criterion")) c.selftrain.config.criterion = parse_criterion(require_string(s, "criterion"));
      if (s.contains("beam")) c.selftrain.config.beam = get_size(s, "beam");
      if (s.contains("k")) c.selftrain.config.k = get_size(s, "k");
      if (s.contains("generator")) c.selftrain.generator = require_string(s, "generator");
      if (s.contains("verifier")) c.selftrain.verifier = resolve_spec(base_dir, require_string(s, "verifier"));
      if (c.selftrain.config.beam == 0) throw ConfigError("beam must be at least 1");
    }
    Json mixture = j.contains("mixture") ? j["mixture"] : Json::object();
    if (!mixture.contains("seed")) mixture["seed"] = c.seed;
    c.mixture = mixture_config_from_json(mixture);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  make_generator(c.selftrain.generator);
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return pipeline_config_from_json(j, path.parent_path());
}

Json pipeline_settings_to_json(const PipelineConfig& c) {
  const bool provider_file = c.retrieval.provider.rfind(kFilePrefix, 0) == 0;
  const bool verifier_file = c.selftrain.verifier.rfind(kFilePrefix, 0) == 0;
  return Json{
      {"seed", c.seed},
      {"retrieval",
       {{"method", method_name(c.retrieval.method)},
        {"tau", c.retrieval.tau},
        {"provider", provider_file ? "file" : c.retrieval.provider}}},
      {"masking", {{"strategy", strategy_name(c.masking.strategy)}, {"rate", c.masking.rate}}},
      {"sql",
       {{"count", c.sql_count},
        {"max_answers", c.sampler.max_answers},
        {"max_limit", c.sampler.max_limit},
        {"attempts_per_record", c.sampler.attempts_per_record}}},
      {"selftrain",
       {{"criterion", criterion_name(c.selftrain.config.criterion)},
        {"beam", c.selftrain.config.beam},
        {"k", c.selftrain.config.k},
        {"generator", c.selftrain.generator},
        {"verifier", verifier_file ? "file" : c.selftrain.verifier}}},
      {"mixture", mixture_config_to_json(c.mixture)}};
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(std::string_view spec) {
  if (spec == "stub") return std::make_unique<HashedNgramProvider>();
  if (spec.rfind(kFilePrefix, 0) == 0) {
    return std::make_unique<FileEmbeddingProvider>(fs::path(spec.substr(kFilePrefix.size())));
  }
  throw ConfigError("unknown embedding provider '" + std::string(spec) + "'");
}

std::unique_ptr<Sql2NlGenerator> make_generator(std::string_view name) {
  if (name == "template") return std::make_unique<TemplateVerbalizer>();
  if (name == "corrupting") return std::make_unique<CorruptingVerbalizer>();
  throw ConfigError("unknown generator '" + std::string(name) + "'");
}

std::unique_ptr<QaVerifier> make_verifier(std::string_view spec) {
  if (spec == "overlap") return std::make_unique<OverlapVerifier>();
  if (spec.rfind(kFilePrefix, 0) == 0) {
    return std::make_unique<ScoreFileVerifier>(fs::path(spec.substr(kFilePrefix.size())));
  }
  throw ConfigError("unknown verifier '" + std::string(spec) + "'");
}

std::vector<AlignedPair> retrieve_pairs(const CorpusStore& store, const RetrievalSettings& settings,
                                        Diagnostics* diag) {
  std::unique_ptr<EmbeddingProvider> provider;
  if (settings.method == RetrievalMethod::kDense) provider = make_embedding_provider(settings.provider);
  const HeuristicPhraseDetector detector;
  std::vector<AlignedPair> out;
  for (const auto& [id, table] : store.tables()) {
    const std::vector<Sentence> candidates = candidate_sentences(id, store, diag);
    if (candidates.empty()) continue;
    std::optional<AlignedPair> pair;
    switch (settings.method) {
      case RetrievalMethod::kString: pair = select_sentence_string(table, candidates); break;
      case RetrievalMethod::kBm25: pair = select_sentence_bm25(table, candidates); break;
      case RetrievalMethod::kTitleHeuristic: pair = select_sentence_title(table, candidates); break;
      case RetrievalMethod::kDense:
        pair = select_sentence_dense(table, candidates, *provider, detector, settings.tau, diag).pair;
        break;
    }
    if (!pair) {
      if (diag) diag->count("retrieve.no_pair");
      continue;
    }
    validate_pair(*pair, table);
    out.push_back(std::move(*pair));
  }
  return out;
}

std::vector<MaskedExample> mask_pairs(std::span<const AlignedPair> pairs, const CorpusStore& store,
                                      const MaskSettings& settings, std::uint64_t seed,
                                      Diagnostics* diag) {
  std::vector<MaskedExample> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const AlignedPair& pair = pairs[i];
    const Table* table = store.find_table(pair.table_id);
    if (!table) {
      if (diag) {
        diag->warn("mask: pair " + std::to_string(i) + " names unknown table '" + pair.table_id + "'");
        diag->count("mask.unknown_table");
      }
      continue;
    }
    if (settings.strategy == MaskStrategy::kSalient) {
      if (pair.mentionless()) {
        if (diag) diag->count("mask.mentionless_skipped");
        continue;
      }
      out.push_back(mask_salient(pair, *table));
    } else {
      out.push_back(mask_random(pair, *table, settings.rate, seed ^ static_cast<std::uint64_t>(i)));
    }
    validate_masked_example(out.back());
  }
  return out;
}

namespace {

struct Stage {
  std::string name;
  std::vector<fs::path> outputs;
  std::function<std::size_t()> run;
};

// Returns the record count stored in a checkpoint that still matches.
std::optional<std::size_t> valid_checkpoint(const fs::path& done, const Stage& stage,
                                            const std::string& fingerprint, Diagnostics& diag) {
  if (!fs::exists(done)) return std::nullopt;
  auto corrupted = [&](const std::string& why) -> std::optional<std::size_t> {
    diag.warn("checkpoint for stage '" + stage.name + "' is corrupted (" + why + "); re-running");
    diag.count("pipeline.corrupted_checkpoints");
    return std::nullopt;
  };
  Json j;
  try {
    j = Json::parse(read_file(done));
    if (require_string(j, "fingerprint") != fingerprint) return std::nullopt;
    const Json& files = require(j, "files");
    for (const fs::path& out : stage.outputs) {
      const std::string key = out.filename().string();
      if (!files.contains(key)) return corrupted(key + " not recorded");
      if (!fs::exists(out)) return corrupted(key + " missing");
      if (file_hash(out) != files[key].get<std::string>()) return corrupted(key + " changed");
    }
    return static_cast<std::size_t>(require_int(j, "records"));
  } catch (const std::exception& e) {
    return corrupted(e.what());
  }
}

std::vector<Json> read_records(const fs::path& path) { return read_jsonl(path); }

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, Diagnostics* diag) {
  Diagnostics local;
  Diagnostics& d = diag ? *diag : local;
  const fs::path w = config.work_dir;
  fs::create_directories(w);
  PipelineResult result;
  result.output = config.output.empty() ? w / "mixture.jsonl" : config.output;

  const fs::path store_file = w / "store.jsonl";
  const fs::path pairs_file = w / "pairs.jsonl";
  const fs::path mask_file = w / "natural_mask.jsonl";
  const fs::path sql_file = w / "sql_qa.jsonl";
  const fs::path selected_file = w / "selftrain.jsonl";
  const fs::path synthetic_file = w / "synthetic_qa.jsonl";
  const fs::path training_file = w / "sql_nl_training.jsonl";
  const fs::path stats_file = w / "stats.json";

  // TODO: key each stage on only the settings and inputs it reads; editing
  // the template pack currently re-runs ingest and retrieve as well.
  std::string base = dump_line(pipeline_settings_to_json(config));
  for (const fs::path& in : {config.tables, config.documents, config.templates}) {
    try {
      base += "|" + file_hash(in);
    } catch (const IoError& e) {
      throw StageError("ingest", e.what());
    }
  }
  if (!config.supervised.empty()) base += "|" + file_hash(config.supervised);
  for (const std::string& spec : {config.retrieval.provider, config.selftrain.verifier}) {
    if (spec.rfind(kFilePrefix, 0) == 0) base += "|" + file_hash(spec.substr(kFilePrefix.size()));
  }

  std::optional<CorpusStore> cached;
  auto store = [&]() -> const CorpusStore& {
    if (!cached) cached = load_store(store_file);
    return *cached;
  };

  std::vector<Stage> stages;
  stages.push_back({"ingest", {store_file}, [&] {
    CorpusStore s;
    ingest_documents(config.documents, s, &d);
    ingest_tables(config.tables, s, &d);
    s.drop_dangling_tables(&d);
    if (s.tables().empty()) throw Error("no table survived ingestion");
    save_store(s, store_file);
    cached.reset();
    return s.tables().size();
  }});
  stages.push_back({"retrieve", {pairs_file}, [&] {
    const auto pairs = retrieve_pairs(store(), config.retrieval, &d);
    JsonlWriter out(pairs_file);
    for (const AlignedPair& p : pairs) out.write(pair_to_json(p));
    out.close();
    return pairs.size();
  }});
  stages.push_back({"mask", {mask_file}, [&] {
    std::vector<AlignedPair> pairs;
    for (const Json& j : read_records(pairs_file)) pairs.push_back(pair_from_json(j));
    const auto examples = mask_pairs(pairs, store(), config.masking, config.seed, &d);
    JsonlWriter out(mask_file);
    for (const MaskedExample& ex : examples) out.write(to_mask_record(ex));
    out.close();
    return examples.size();
  }});
  stages.push_back({"sample-sql", {sql_file}, [&] {
    const auto templates = load_templates(config.templates);
    std::vector<Table> tables;
    for (const auto& [id, t] : store().tables()) tables.push_back(t);
    const SampleResult sampled =
        sample_sql_dataset(tables, templates, config.sql_count, config.seed, config.sampler, &d);
    JsonlWriter out(sql_file);
    for (const SampledSql& s : sampled.records) out.write(sql_record_to_json(s));
    out.close();
    return sampled.records.size();
  }});
  stages.push_back({"selftrain", {selected_file, synthetic_file, training_file}, [&] {
    std::vector<SampledSql> sqls;
    for (const Json& j : read_records(sql_file)) sqls.push_back(parse_sql_record(j));
    const auto generator = make_generator(config.selftrain.generator);
    const auto verifier = make_verifier(config.selftrain.verifier);
    const SelfTrainResult st = run_selftrain(sqls, store(), *generator, *verifier, config.selftrain.config, &d);
    JsonlWriter selected(selected_file);
    for (const SelfTrainPair& p : st.selected) selected.write(selftrain_pair_to_json(p));
    selected.close();
    write_jsonl(synthetic_file, emit_synthetic_qa(st.selected, store(), &d));
    std::vector<SqlNlPair> supervised;
    if (!config.supervised.empty()) supervised = load_sql_nl_pairs(config.supervised);
    JsonlWriter training(training_file);
    for (const TrainingPair& p : assemble_training_set(supervised, st.selected)) {
      training.write(training_pair_to_json(p));
    }
    training.close();
    return st.selected.size();
  }});
  stages.push_back({"emit", {result.output, stats_file}, [&] {
    std::array<std::vector<Json>, kNumTasks> streams;
    streams[task_index(Task::kNaturalMask)] = load_stream(mask_file, Task::kNaturalMask);
    streams[task_index(Task::kSyntheticQa)] = load_stream(synthetic_file, Task::kSyntheticQa);
    streams[task_index(Task::kSqlQa)] = load_stream(sql_file, Task::kSqlQa);
    const std::vector<Json> mixture = build_mixture(streams, store(), config.mixture, &d);
    write_jsonl(result.output, mixture);
    StatsReport report;
    for (const Json& j : read_records(pairs_file)) add_pair(report, pair_from_json(j));
    for (const Json& j : mixture) add_record(report, j);
    std::ofstream(stats_file) << stats_to_json(report).dump(2) << "\n";
    return mixture.size();
  }});

  std::string upstream = hex64(fnv1a64(base));
  for (const Stage& stage : stages) {
    const std::string fingerprint = hex64(fnv1a64(upstream + "|" + stage.name));
    const fs::path done = w / (stage.name + ".done");
    StageReport report{stage.name, false, 0};
    if (auto records = valid_checkpoint(done, stage, fingerprint, d)) {
      report.resumed = true;
      report.records = *records;
    } else {
      fs::remove(done);
      try {
        report.records = stage.run();
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(stage.name, e.what());
      }
      Json files = Json::object();
      for (const fs::path& out : stage.outputs) files[out.filename().string()] = file_hash(out);
      std::ofstream(done) << dump_line(Json{{"stage", stage.name},
                                            {"fingerprint", fingerprint},
                                            {"records", report.records},
                                            {"files", files}})
                          << "\n";
    }
    upstream = fingerprint;
    for (const fs::path& out : stage.outputs) upstream += "|" + file_hash(out);
    result.stages.push_back(report);
  }
  result.stats = Json::parse(read_file(stats_file));
  return result;
}

}  // namespace tqforge
