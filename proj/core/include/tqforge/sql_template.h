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

#ifndef TQFORGE_SQL_TEMPLATE_H_
#define TQFORGE_SQL_TEMPLATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/sql.h"
#include "tqforge/table.h"

namespace tqforge {

// A query skeleton whose columns, literals and limits are typed slots.
struct SqlTemplate {
  std::string id;
  SelectQuery skeleton;

  std::string text() const { return render_sql(skeleton); }
};

// Concrete values for every slot of a template, keyed by slot name.
struct SlotFillers {
  std::map<std::string, std::string> columns;   // COLn -> column name
  std::map<std::string, std::string> literals;  // VALn / NUMn -> literal text
  std::map<std::string, long long> limits;      // Kn -> LIMIT value
  bool operator==(const SlotFillers&) const = default;
};

struct TemplateExtraction {
  SqlTemplate tpl;
  SlotFillers fillers;  // the values abstracted away from the original query
};

// "tpl-" + 64-bit FNV-1a of the rendered skeleton.
std::string template_id(const SelectQuery& skeleton);

// Abstracts a concrete query. Each distinct column becomes COLn (numbered by
// first appearance), typed number when it meets a numeric literal, an
// ordering comparison, SUM/AVG/MIN/MAX or ORDER BY, and text otherwise.
// String literals become VALn, numeric literals NUMn, limits Kn.
TemplateExtraction extract_template(const SelectQuery& query);

// Replaces every slot. Throws ConfigError for a slot without a filler.
SelectQuery fill_template(const SelectQuery& skeleton, const SlotFillers& fillers);

// Parses a skeleton; throws ParseError, or ConfigError when one column
// slot is used with two types.
SqlTemplate parse_template(std::string id, std::string_view skeleton);

// Template file: one {"id", "skeleton"} object per line.
std::vector<SqlTemplate> load_templates(const std::filesystem::path& path);
void save_templates(const std::filesystem::path& path, std::span<const SqlTemplate> templates);

// Distinct templates of the given queries, in order of first appearance.
std::vector<SqlTemplate> extract_templates(std::span<const SelectQuery> queries);

struct SamplerConfig {
  std::size_t max_answers = 20;
  long long max_limit = 3;
  std::size_t attempts_per_record = 50;
};

struct SampledSql {
  std::string table_id;
  std::string template_id;
  std::string sql;
  AnswerList answers;
  bool operator==(const SampledSql&) const = default;
};

// Fills the template from the table: column slots with distinct columns of
// the slot's type, VAL slots with a cell of the compared column, NUM slots
// with a cell value (shifted by -1, 0 or +1 under <, >, <=, >=), K slots
// with 1..max_limit. Returns nullopt when no columns fit, execution fails,
// or the answer list is empty, has an empty entry, or exceeds max_answers.
std::optional<SampledSql> instantiate_template(const SqlTemplate& tpl, const Table& table,
                                               std::uint64_t seed, const SamplerConfig& config = {});

struct SampleResult {
  std::vector<SampledSql> records;
  std::size_t attempts = 0;
  bool partial = false;
};

// Round-robin over tables x templates until n samples are accepted or the
// attempt budget (n * attempts_per_record) runs out.
SampleResult sample_sql_dataset(std::span<const Table> tables,
                                std::span<const SqlTemplate> templates, std::size_t n,
                                std::uint64_t seed, const SamplerConfig& config = {},
                                Diagnostics* diag = nullptr);

// {"task": "sql-qa", "table_id", "sql", "answers": [string], "template_id"}
Json sql_record_to_json(const SampledSql& record);
SampledSql parse_sql_record(const Json& record);

}  // namespace tqforge

#endif  // TQFORGE_SQL_TEMPLATE_H_
