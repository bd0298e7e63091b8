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

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <string>

#include "support/tempdir.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/masking.h"
#include "tqforge/pipeline.h"
#include "tqforge/records.h"

namespace tqforge {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;

const fs::path kMiniConfig = fs::path(TQFORGE_SOURCE_DIR) / "data" / "mini" / "config.json";

PipelineConfig mini_config(const fs::path& work) {
  PipelineConfig c = load_pipeline_config(kMiniConfig);
  c.work_dir = work;
  c.output = work / "mixture.jsonl";
  return c;
}

// Mixture records add "output" (and for sql-qa also "input") to the
// stream schema.
Json stream_body(Json record) {
  if (record.at("task") != "natural-mask") record.erase("input");
  record.erase("output");
  return record;
}

std::set<std::string> resumed(const PipelineResult& r) {
  std::set<std::string> out;
  for (const StageReport& s : r.stages) {
    if (s.resumed) out.insert(s.name);
  }
  return out;
}

TEST(PipelineConfig, ResolvesPathsAndDefaults) {
  const Json j = Json::parse(R"({"tables": "t.jsonl", "documents": "/abs/d.jsonl", "templates": "x.jsonl",
                                 "work_dir": "w", "seed": 5,
                                 "retrieval": {"method": "dense", "provider": "file:emb.jsonl"}})");
  const PipelineConfig c = pipeline_config_from_json(j, "/base");
  EXPECT_EQ(c.tables, fs::path("/base/t.jsonl"));
  EXPECT_EQ(c.documents, fs::path("/abs/d.jsonl"));
  EXPECT_EQ(c.retrieval.provider, "file:/base/emb.jsonl");
  EXPECT_EQ(c.retrieval.method, RetrievalMethod::kDense);
  EXPECT_EQ(c.mixture.seed, 5u);
  EXPECT_THROW(pipeline_config_from_json(Json::parse(R"({"tables": "t", "bogus": 1})"), "/b"), Error);
  EXPECT_THROW(make_generator("neural"), ConfigError);
  EXPECT_THROW(make_embedding_provider("bert"), ConfigError);
}

TEST(Pipeline, MiniCorpusEmitsAllTasks) {
  TempDir dir;
  Diagnostics diag;
  const PipelineResult r = run_pipeline(mini_config(dir.path()), &diag);
  ASSERT_EQ(r.stages.size(), kStageNames.size());
  EXPECT_TRUE(resumed(r).empty());
  std::set<std::string> tasks;
  std::size_t n = 0;
  for (const Json& rec : read_jsonl(r.output)) {
    const Task t = validate_record(rec);
    tasks.insert(std::string(task_name(t)));
    if (t == Task::kNaturalMask) {
      const MaskedExample ex = parse_mask_record(stream_body(rec));
      EXPECT_EQ(reconstruct_target(ex), ex.target);
    }
    ++n;
  }
  EXPECT_EQ(tasks, (std::set<std::string>{"natural-mask", "synthetic-qa", "sql-qa"}));
  EXPECT_EQ(n, r.stages.back().records);
  EXPECT_EQ(r.stats.at("dense_score_histogram").size(), 20u);
  EXPECT_TRUE(fs::exists(dir / "sql_nl_training.jsonl"));
}

TEST(Pipeline, ResumesAfterRetrieve) {
  TempDir dir;
  const PipelineConfig c = mini_config(dir.path());
  run_pipeline(c);
  const std::string first = read_file(c.output);
  for (std::string_view stage : {"mask", "sample-sql", "selftrain", "emit"}) {
    fs::remove(dir / (std::string(stage) + ".done"));
  }
  const PipelineResult again = run_pipeline(c);
  EXPECT_EQ(resumed(again), (std::set<std::string>{"ingest", "retrieve"}));
  EXPECT_EQ(read_file(c.output), first);
  EXPECT_EQ(resumed(run_pipeline(c)).size(), kStageNames.size());
}

TEST(Pipeline, CorruptedCheckpointIsRerunWithWarning) {
  TempDir dir;
  const PipelineConfig c = mini_config(dir.path());
  run_pipeline(c);
  const std::string first = read_file(c.output);
  dir.write("pairs.jsonl", "garbage\n");
  Diagnostics diag;
  const PipelineResult again = run_pipeline(c, &diag);
  EXPECT_EQ(resumed(again).count("retrieve"), 0u);
  EXPECT_EQ(resumed(again).count("ingest"), 1u);
  EXPECT_EQ(diag.counter("pipeline.corrupted_checkpoints"), 1u);
  EXPECT_EQ(read_file(c.output), first);

  dir.write("emit.done", "{not json");
  Diagnostics diag2;
  EXPECT_EQ(resumed(run_pipeline(c, &diag2)).count("emit"), 0u);
  EXPECT_EQ(diag2.counter("pipeline.corrupted_checkpoints"), 1u);
}

TEST(Pipeline, SettingChangeInvalidatesCheckpoints) {
  TempDir dir;
  PipelineConfig c = mini_config(dir.path());
  run_pipeline(c);
  c.seed += 1;
  c.mixture.seed += 1;
  EXPECT_TRUE(resumed(run_pipeline(c)).empty());
}

TEST(Pipeline, StageFailureNamesTheStage) {
  TempDir dir;
  PipelineConfig c = mini_config(dir.path());
  c.templates = dir.write("bad_templates.jsonl", "{\"id\":\"x\",\"skeleton\":\"SELECT\"}\n");
  try {
    run_pipeline(c);
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "sample-sql");
    EXPECT_NE(std::string(e.what()).find("stage 'sample-sql' failed"), std::string::npos);
  }
  c.tables = dir / "missing.jsonl";
  EXPECT_THROW(run_pipeline(c), StageError);
}

TEST(Pipeline, IdenticalConfigAndSeedGiveIdenticalBytes) {
  TempDir a;
  TempDir b;
  const PipelineResult ra = run_pipeline(mini_config(a.path()));
  const PipelineResult rb = run_pipeline(mini_config(b.path()));
  for (const char* f : {"pairs.jsonl", "natural_mask.jsonl", "sql_qa.jsonl", "selftrain.jsonl",
                        "synthetic_qa.jsonl", "stats.json", "mixture.jsonl"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
}

TEST(Pipeline, EveryRetrievalMethodRuns) {
  for (RetrievalMethod m : {RetrievalMethod::kString, RetrievalMethod::kBm25, RetrievalMethod::kDense,
                            RetrievalMethod::kTitleHeuristic}) {
    TempDir dir;
    PipelineConfig c = mini_config(dir.path());
    c.retrieval.method = m;
    c.masking.strategy = m == RetrievalMethod::kString ? MaskStrategy::kSalient : MaskStrategy::kRandom;
    const PipelineResult r = run_pipeline(c);
    EXPECT_GT(r.stages[1].records, 0u) << method_name(m);
    EXPECT_GT(r.stages[2].records, 0u) << method_name(m);
  }
}

}  // namespace
}  // namespace tqforge
