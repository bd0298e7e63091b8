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

#include <string>
#include <vector>

#include "support/generators.h"
#include "support/tempdir.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/rng.h"
#include "tqforge/sql.h"
#include "tqforge/sql_exec.h"
#include "tqforge/sql_template.h"

namespace tqforge {
namespace {

SelectQuery q(std::string_view text) { return parse_sql(text).ast; }

std::vector<Table> sample_tables(std::size_t n) {
  std::vector<Table> out;
  Rng rng(71);
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_table(rng, 8, 5, "t" + std::to_string(i)));
  return out;
}

std::vector<SqlTemplate> sample_templates() {
  return extract_templates(std::vector<SelectQuery>{
      q("SELECT Film WHERE Year = 2002"),
      q("SELECT Film WHERE Nation = 'x'"),
      q("SELECT COUNT(*) WHERE Points > 3"),
      q("SELECT Club ORDER BY Total DESC LIMIT 1"),
      q("SELECT MAX(Total) WHERE Club != 'a'"),
      q("SELECT Film WHERE Year = ( SELECT MIN(Year) )"),
  });
}

TEST(ExtractTemplate, TypedSlots) {
  const TemplateExtraction ex = extract_template(q("SELECT Film WHERE Year = 2002"));
  EXPECT_EQ(ex.tpl.text(), "SELECT {COL1:text} WHERE {COL2:number} = {NUM1}");
  EXPECT_EQ(ex.fillers.columns, (std::map<std::string, std::string>{{"COL1", "Film"}, {"COL2", "Year"}}));
  EXPECT_EQ(ex.fillers.literals, (std::map<std::string, std::string>{{"NUM1", "2002"}}));
  EXPECT_EQ(ex.tpl.id, template_id(ex.tpl.skeleton));
  EXPECT_EQ(ex.tpl.id.rfind("tpl-", 0), 0u);
}

TEST(ExtractTemplate, LiteralsDoNotChangeTheId) {
  EXPECT_EQ(extract_template(q("SELECT Film WHERE Year = 2002")).tpl.id,
            extract_template(q("SELECT Club WHERE Rank = 7")).tpl.id);
  EXPECT_NE(extract_template(q("SELECT Film WHERE Year = 2002")).tpl.id,
            extract_template(q("SELECT Film WHERE Year = 'x'")).tpl.id);
}

TEST(ExtractTemplate, OrderingAndAggregatesMakeNumberColumns) {
  EXPECT_EQ(extract_template(q("SELECT Club ORDER BY Total DESC LIMIT 2")).tpl.text(),
            "SELECT {COL1:text} ORDER BY {COL2:number} DESC LIMIT {K1}");
  EXPECT_EQ(extract_template(q("SELECT SUM(Points) WHERE Club = 'a' AND Club != 'b'")).tpl.text(),
            "SELECT SUM({COL1:number}) WHERE {COL2:text} = {VAL1} AND {COL2:text} != {VAL2}");
}

TEST(ExtractTemplate, NestedSkeletonRefillsToOriginal) {
  const SelectQuery orig = q("SELECT Film WHERE Year = ( SELECT MIN(Year) WHERE Nation = 'USA' )");
  const TemplateExtraction ex = extract_template(orig);
  EXPECT_EQ(ex.tpl.text(),
            "SELECT {COL1:text} WHERE {COL2:number} = ( SELECT MIN({COL2:number}) WHERE {COL3:text} = {VAL1} )");
  EXPECT_EQ(fill_template(ex.tpl.skeleton, ex.fillers), orig);
}

TEST(FillTemplate, MissingFillerIsAnError) {
  const TemplateExtraction ex = extract_template(q("SELECT Film WHERE Year = 2002"));
  SlotFillers partial = ex.fillers;
  partial.literals.clear();
  EXPECT_THROW(fill_template(ex.tpl.skeleton, partial), ConfigError);
}

TEST(ParseTemplate, ChecksSlotTypes) {
  const SqlTemplate t = parse_template("", "SELECT {COL1:text} WHERE {COL2:number} > {NUM1} LIMIT {K1}");
  EXPECT_EQ(t.id, template_id(t.skeleton));
  EXPECT_TRUE(contains_slots(t.skeleton));
  EXPECT_THROW(parse_template("x", "SELECT {COL1:text} WHERE {COL1:number} > {NUM1}"), ConfigError);
  EXPECT_THROW(parse_template("x", "SELECT {COL1:text} WHERE"), ParseError);
}

// Abstracting a query and refilling the slots with the abstracted values
// gives back the query.
TEST(ExtractTemplateProperty, RefillReproducesQuery) {
  Rng rng(73);
  for (int iter = 0; iter < 1000; ++iter) {
    const Table t = testing::random_table(rng, 6, 5);
    const SelectQuery query = testing::random_query(rng, t);
    const TemplateExtraction ex = extract_template(query);
    ASSERT_FALSE(contains_slots(query));
    EXPECT_EQ(fill_template(ex.tpl.skeleton, ex.fillers), query) << render_sql(query);
    EXPECT_EQ(parse_template(ex.tpl.id, ex.tpl.text()).skeleton, ex.tpl.skeleton) << ex.tpl.text();
  }
}

TEST(TemplateFile, SaveLoadAndDuplicates) {
  testing::TempDir dir;
  const auto tpls = sample_templates();
  save_templates(dir / "t.jsonl", tpls);
  const auto back = load_templates(dir / "t.jsonl");
  ASSERT_EQ(back.size(), tpls.size());
  for (std::size_t i = 0; i < tpls.size(); ++i) {
    EXPECT_EQ(back[i].id, tpls[i].id);
    EXPECT_EQ(back[i].skeleton, tpls[i].skeleton);
  }
  const auto dup = dir.write("dup.jsonl", R"j({"id":"a","skeleton":"SELECT {COL1:text}"}
{"id":"a","skeleton":"SELECT COUNT(*)"}
)j");
  EXPECT_THROW(load_templates(dup), Error);
}

TEST(InstantiateTemplate, EqualityAnswerIsNeverEmpty) {
  const SqlTemplate eq = extract_template(q("SELECT Film WHERE Nation = 'x'")).tpl;
  int accepted = 0;
  for (const Table& t : sample_tables(20)) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = instantiate_template(eq, t, seed);
      if (!s) continue;
      ++accepted;
      EXPECT_FALSE(s->answers.answers.empty());
      EXPECT_EQ(execute_sql(q(s->sql), t), s->answers);
      EXPECT_EQ(s->template_id, eq.id);
    }
  }
  EXPECT_GT(accepted, 20);
}

TEST(InstantiateTemplate, NumericSlotOnTextTableFails) {
  const Table text_only{"t", {"A", "B"}, {{"x", "y"}, {"z", "w"}}, "d"};
  const SqlTemplate num = extract_template(q("SELECT A ORDER BY B DESC LIMIT 1")).tpl;
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_FALSE(instantiate_template(num, text_only, seed));
}

TEST(InstantiateTemplate, FixedSeedIsDeterministic) {
  const auto tables = sample_tables(5);
  for (const SqlTemplate& tpl : sample_templates()) {
    for (const Table& t : tables) {
      EXPECT_EQ(instantiate_template(tpl, t, 42), instantiate_template(tpl, t, 42));
    }
  }
}

TEST(InstantiateTemplate, AnswerCapRejectsWideResults) {
  Table wide{"t", {"A", "B"}, {}, "d"};
  for (int i = 0; i < 30; ++i) wide.rows.push_back({"v" + std::to_string(i), "same"});
  const SqlTemplate eq = extract_template(q("SELECT A WHERE B = 'x'")).tpl;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = instantiate_template(eq, wide, seed);
    if (s) EXPECT_LE(s->answers.answers.size(), 20u) << s->sql;
  }
  SamplerConfig loose;
  loose.max_answers = 100;
  bool wide_seen = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = instantiate_template(eq, wide, seed, loose);
    wide_seen = wide_seen || (s && s->answers.answers.size() == 30);
  }
  EXPECT_TRUE(wide_seen);
}

TEST(SampleSqlDataset, FillsRequestAndReexecutes) {
  const auto tables = sample_tables(20);
  const auto tpls = sample_templates();
  Diagnostics diag;
  const SampleResult r = sample_sql_dataset(tables, tpls, 100, 9, {}, &diag);
  ASSERT_EQ(r.records.size(), 100u);
  EXPECT_FALSE(r.partial);
  EXPECT_EQ(diag.counter("sql.shortfall"), 0u);
  for (const SampledSql& s : r.records) {
    const Table* t = nullptr;
    for (const Table& c : tables) t = c.id == s.table_id ? &c : t;
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(execute_sql(q(s.sql), *t), s.answers) << s.sql;
  }
}

TEST(SampleSqlDataset, ShortfallIsPartialWithDiagnostic) {
  const std::vector<Table> tables = {Table{"t", {"A", "B"}, {{"x", "y"}}, "d"}};
  const auto tpls = extract_templates(std::vector<SelectQuery>{q("SELECT A ORDER BY B DESC LIMIT 1")});
  SamplerConfig cfg;
  cfg.attempts_per_record = 3;
  Diagnostics diag;
  const SampleResult r = sample_sql_dataset(tables, tpls, 10, 1, cfg, &diag);
  EXPECT_TRUE(r.partial);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.attempts, 30u);
  EXPECT_EQ(diag.counter("sql.shortfall"), 10u);
}

TEST(SampleSqlDataset, SameSeedSameBytes) {
  const auto tables = sample_tables(10);
  const auto tpls = sample_templates();
  auto dump = [&](std::uint64_t seed) {
    std::string out;
    for (const SampledSql& s : sample_sql_dataset(tables, tpls, 80, seed).records) {
      out += dump_line(sql_record_to_json(s)) + "\n";
    }
    return out;
  };
  EXPECT_EQ(dump(5), dump(5));
  EXPECT_NE(dump(5), dump(6));
}

TEST(SqlRecord, RoundTripAndValidation) {
  const SampledSql s{"t1", "tpl-x", "SELECT Film WHERE Year = 2002", {{"Spider-Man"}}};
  const Json j = sql_record_to_json(s);
  EXPECT_EQ(j.at("task"), "sql-qa");
  EXPECT_EQ(parse_sql_record(j), s);
  Json no_tpl = j;
  no_tpl.erase("template_id");
  EXPECT_EQ(parse_sql_record(no_tpl).sql, s.sql);
  Json bad = j;
  bad["sql"] = "SELECT";
  EXPECT_THROW(parse_sql_record(bad), SchemaError);
  Json empty = j;
  empty["answers"] = Json::array();
  EXPECT_THROW(parse_sql_record(empty), SchemaError);
}

}  // namespace
}  // namespace tqforge
