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

// tqforge: build table-QA pretraining data from tables and their documents.

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tqforge/alignment.h"
#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/masking.h"
#include "tqforge/mixture.h"
#include "tqforge/pipeline.h"
#include "tqforge/selftrain.h"
#include "tqforge/sql_template.h"
#include "tqforge/stats.h"

namespace fs = std::filesystem;
using namespace tqforge;

namespace {

void report(const Diagnostics& diag) {
  for (const std::string& m : diag.messages()) std::cerr << "warning: " << m << "\n";
  for (const auto& [k, v] : diag.counters()) std::cerr << "count: " << k << " = " << v << "\n";
}

std::vector<AlignedPair> load_pairs(const fs::path& path) {
  std::vector<AlignedPair> out;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
    try {
      out.push_back(pair_from_json(j));
    } catch (const Error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::vector<SampledSql> load_sql_records(const fs::path& path) {
  std::vector<SampledSql> out;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& j) {
    try {
      out.push_back(parse_sql_record(j));
    } catch (const Error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

void write_stats(const Json& stats, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << stats.dump(2) << "\n";
  } else {
    std::ofstream(out) << stats.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tqforge: table-QA pretraining data factory"};
  app.require_subcommand(1);
  Diagnostics diag;
  std::function<void()> action;

  // ingest
  std::string tables, documents, out;
  auto* ingest = app.add_subcommand("ingest", "Validate tables and documents into a corpus store");
  ingest->add_option("--tables", tables, "Table JSONL")->required()->check(CLI::ExistingFile);
  ingest->add_option("--docs,--documents", documents, "Document JSONL")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out, "Store JSONL")->required();
  ingest->callback([&] {
    action = [&] {
      CorpusStore store;
      const IngestStats d = ingest_documents(documents, store, &diag);
      const IngestStats t = ingest_tables(tables, store, &diag);
      const std::size_t dangling = store.drop_dangling_tables(&diag);
      save_store(store, out);
      std::cerr << "documents: " << d.accepted << " accepted, " << d.malformed << " malformed, "
                << d.duplicates << " duplicate, " << d.dropped << " without sentences\n"
                << "tables: " << t.accepted - dangling << " accepted, " << t.malformed
                << " malformed, " << t.duplicates << " duplicate, " << dangling << " dangling\n";
    };
  });

  // retrieve
  std::string store_path, method = "string", provider = "stub";
  double tau = kDefaultTau;
  auto* retrieve = app.add_subcommand("retrieve", "Align each table with a sentence of its document");
  retrieve->add_option("--store", store_path, "Store JSONL")->required()->check(CLI::ExistingFile);
  retrieve->add_option("--method", method, "string | bm25 | dense | title-heuristic")
      ->check(CLI::IsMember({"string", "bm25", "dense", "title-heuristic"}));
  retrieve->add_option("--tau", tau, "Dense phrase threshold");
  retrieve->add_option("--provider", provider, "stub | file:PATH (dense embeddings)");
  retrieve->add_option("--out", out, "Pairs JSONL")->required();
  retrieve->callback([&] {
    action = [&] {
      const CorpusStore store = load_store(store_path);
      const auto pairs = retrieve_pairs(store, {parse_method(method), tau, provider}, &diag);
      JsonlWriter w(out);
      for (const AlignedPair& p : pairs) w.write(pair_to_json(p));
      w.close();
      std::cerr << "pairs: " << pairs.size() << "\n";
    };
  });

  // mask
  std::string pairs_path, strategy = "salient";
  double rate = kDefaultMaskRate;
  std::uint64_t seed = 0;
  auto* mask = app.add_subcommand("mask", "Mask aligned sentences");
  mask->add_option("--store", store_path, "Store JSONL")->required()->check(CLI::ExistingFile);
  mask->add_option("--pairs", pairs_path, "Pairs JSONL")->required()->check(CLI::ExistingFile);
  mask->add_option("--strategy", strategy, "salient | random")->check(CLI::IsMember({"salient", "random"}));
  mask->add_option("--rate", rate, "Random masking rate")->check(CLI::Range(0.0, 1.0));
  mask->add_option("--seed", seed, "Seed");
  mask->add_option("--out", out, "Mask records JSONL")->required();
  mask->callback([&] {
    action = [&] {
      const CorpusStore store = load_store(store_path);
      const auto pairs = load_pairs(pairs_path);
      const auto examples = mask_pairs(pairs, store, {parse_strategy(strategy), rate}, seed, &diag);
      JsonlWriter w(out);
      for (const MaskedExample& ex : examples) w.write(to_mask_record(ex));
      w.close();
      std::cerr << "natural-mask records: " << examples.size() << "\n";
    };
  });

  // templates
  std::string sql_nl_path;
  auto* templates = app.add_subcommand("templates", "Extract SQL templates from (sql, question) pairs");
  templates->add_option("--pairs", sql_nl_path, "SQL-NL pairs JSONL")->required()->check(CLI::ExistingFile);
  templates->add_option("--out", out, "Template JSONL")->required();
  templates->callback([&] {
    action = [&] {
      std::vector<SelectQuery> queries;
      for (const SqlNlPair& p : load_sql_nl_pairs(sql_nl_path)) queries.push_back(parse_sql(p.sql).ast);
      const auto tpls = extract_templates(queries);
      save_templates(out, tpls);
      std::cerr << "templates: " << tpls.size() << " from " << queries.size() << " queries\n";
    };
  });

  // sample-sql
  std::string templates_path;
  std::size_t n = 100;
  SamplerConfig sampler;
  auto* sample = app.add_subcommand("sample-sql", "Instantiate templates over tables and execute them");
  sample->add_option("--store", store_path, "Store JSONL")->required()->check(CLI::ExistingFile);
  sample->add_option("--templates", templates_path, "Template JSONL")->required()->check(CLI::ExistingFile);
  sample->add_option("--n", n, "Records to sample");
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--max-answers", sampler.max_answers, "Largest answer list kept");
  sample->add_option("--out", out, "sql-qa JSONL")->required();
  sample->callback([&] {
    action = [&] {
      const CorpusStore store = load_store(store_path);
      std::vector<Table> ts;
      for (const auto& [id, t] : store.tables()) ts.push_back(t);
      const SampleResult r = sample_sql_dataset(ts, load_templates(templates_path), n, seed, sampler, &diag);
      JsonlWriter w(out);
      for (const SampledSql& s : r.records) w.write(sql_record_to_json(s));
      w.close();
      std::cerr << "sql-qa records: " << r.records.size() << " (" << r.attempts << " attempts)\n";
    };
  });

  // selftrain
  std::string sql_path, criterion = "ver-max", generator = "template", verifier = "overlap";
  std::string supervised_path, synthetic_out, training_out, candidates_out;
  SelfTrainConfig st;
  auto* selftrain = app.add_subcommand("selftrain", "Pair sampled SQL with verified questions");
  selftrain->add_option("--store", store_path, "Store JSONL")->required()->check(CLI::ExistingFile);
  selftrain->add_option("--sql", sql_path, "sql-qa JSONL")->required()->check(CLI::ExistingFile);
  selftrain->add_option("--criterion", criterion, "ver-max | ver-min | gen-max")
      ->check(CLI::IsMember({"ver-max", "ver-min", "gen-max"}));
  selftrain->add_option("--beam", st.beam, "Candidates per SQL")->check(CLI::PositiveNumber);
  selftrain->add_option("--k", st.k, "Pairs to keep");
  selftrain->add_option("--generator", generator, "template | corrupting");
  selftrain->add_option("--verifier", verifier, "overlap | file:PATH (sql_id, candidate_idx, score)");
  selftrain->add_option("--supervised", supervised_path, "Supervised SQL-NL pairs JSONL");
  selftrain->add_option("--out", out, "Selected pairs JSONL")->required();
  selftrain->add_option("--synthetic-out", synthetic_out, "synthetic-qa JSONL");
  selftrain->add_option("--training-out", training_out, "Combined SQL-NL training set JSONL");
  selftrain->add_option("--candidates-out", candidates_out,
                        "Write every candidate (for an external verifier) and stop");
  selftrain->callback([&] {
    action = [&] {
      const CorpusStore store = load_store(store_path);
      const auto sqls = load_sql_records(sql_path);
      const auto gen = make_generator(generator);
      if (!candidates_out.empty()) {
        JsonlWriter w(candidates_out);
        for (std::size_t id = 0; id < sqls.size(); ++id) {
          for (const Candidate& c : generate_candidates(id, parse_sql(sqls[id].sql).ast, *gen, st.beam)) {
            w.write(Json{{"sql_id", id}, {"candidate_idx", c.index}, {"table_id", sqls[id].table_id},
                         {"sql", sqls[id].sql}, {"question", c.question},
                         {"answers", sqls[id].answers.answers}, {"gen_score", c.gen_score}});
          }
        }
        w.close();
        std::cerr << "candidates: " << w.count() << "\n";
        return;
      }
      st.criterion = parse_criterion(criterion);
      const SelfTrainResult r = run_selftrain(sqls, store, *gen, *make_verifier(verifier), st, &diag);
      JsonlWriter w(out);
      for (const SelfTrainPair& p : r.selected) w.write(selftrain_pair_to_json(p));
      w.close();
      if (!synthetic_out.empty()) write_jsonl(synthetic_out, emit_synthetic_qa(r.selected, store, &diag));
      if (!training_out.empty()) {
        std::vector<SqlNlPair> supervised;
        if (!supervised_path.empty()) supervised = load_sql_nl_pairs(supervised_path);
        JsonlWriter t(training_out);
        for (const TrainingPair& p : assemble_training_set(supervised, r.selected)) t.write(training_pair_to_json(p));
        t.close();
      }
      std::cerr << "selected: " << r.selected.size() << " of " << r.winners.size() << "\n";
    };
  });

  // emit
  std::string mask_path, synthetic_path, mixture_config;
  std::optional<std::uint64_t> emit_seed;
  bool no_shuffle = false;
  auto* emit = app.add_subcommand("emit", "Mix the three record streams into one file");
  emit->add_option("--store", store_path, "Store JSONL")->required()->check(CLI::ExistingFile);
  emit->add_option("--mask", mask_path, "natural-mask JSONL")->check(CLI::ExistingFile);
  emit->add_option("--synthetic", synthetic_path, "synthetic-qa JSONL")->check(CLI::ExistingFile);
  emit->add_option("--sql", sql_path, "sql-qa JSONL")->check(CLI::ExistingFile);
  emit->add_option("--config", mixture_config, "Mixture config JSON")->check(CLI::ExistingFile);
  emit->add_option("--seed", emit_seed, "Seed (overrides the config)");
  emit->add_flag("--no-shuffle", no_shuffle, "Keep stream order");
  emit->add_option("--out", out, "Mixture JSONL")->required();
  emit->callback([&] {
    action = [&] {
      MixtureConfig config;
      if (!mixture_config.empty()) {
        std::ifstream in(mixture_config);
        config = mixture_config_from_json(Json::parse(in));
      }
      if (emit_seed) config.seed = *emit_seed;
      if (no_shuffle) config.shuffle = false;
      std::array<std::vector<Json>, kNumTasks> streams;
      const std::array<std::pair<std::string*, Task>, kNumTasks> inputs = {
          std::pair{&mask_path, Task::kNaturalMask}, std::pair{&synthetic_path, Task::kSyntheticQa},
          std::pair{&sql_path, Task::kSqlQa}};
      for (const auto& [path, task] : inputs) {
        if (path->empty()) {
          config.streams[task_index(task)].enabled = false;
        } else {
          streams[task_index(task)] = load_stream(*path, task);
        }
      }
      const CorpusStore store = load_store(store_path);
      const auto mixture = build_mixture(streams, store, config, &diag);
      write_jsonl(out, mixture);
      std::cerr << "mixture records: " << mixture.size() << "\n";
    };
  });

  // stats
  std::vector<std::string> record_paths;
  auto* stats = app.add_subcommand("stats", "Summarize pairs and records");
  stats->add_option("--pairs", pairs_path, "Pairs JSONL")->check(CLI::ExistingFile);
  stats->add_option("--records", record_paths, "Record JSONL files")->check(CLI::ExistingFile);
  stats->add_option("--out", out, "Report JSON (default stdout)");
  stats->callback([&] {
    action = [&] {
      StatsReport r;
      if (!pairs_path.empty()) {
        for (const AlignedPair& p : load_pairs(pairs_path)) add_pair(r, p);
      }
      for (const std::string& path : record_paths) {
        for_each_jsonl(path, [&](std::size_t, const Json& j) { add_record(r, j); });
      }
      write_stats(stats_to_json(r), out);
    };
  });

  // run
  std::string config_path;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run every stage with checkpoints");
  run->add_option("--config", config_path, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Seed (overrides the config)");
  std::string run_work_dir;
  run->add_option("--out", out, "Mixture JSONL (overrides the config)");
  run->add_option("--work-dir", run_work_dir, "Checkpoint directory (overrides the config)");
  run->callback([&] {
    action = [&] {
      PipelineConfig config = load_pipeline_config(config_path);
      if (run_seed) {
        config.seed = *run_seed;
        config.mixture.seed = *run_seed;
      }
      if (!run_work_dir.empty()) config.work_dir = run_work_dir;
      if (!out.empty()) config.output = out;
      const PipelineResult r = run_pipeline(config, &diag);
      for (const StageReport& s : r.stages) {
        std::cerr << s.name << ": " << s.records << " records" << (s.resumed ? " (checkpoint)" : "") << "\n";
      }
      std::cerr << "output: " << r.output.string() << "\n";
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    action();
  } catch (const std::exception& e) {
    report(diag);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  report(diag);
  return 0;
}
