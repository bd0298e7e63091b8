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

#include "tqforge/sql_template.h"

#include <algorithm>
#include <set>

#include "tqforge/records.h"
#include "tqforge/rng.h"
#include "tqforge/sql_exec.h"
#include "tqforge/text.h"

namespace tqforge {

std::string template_id(const SelectQuery& skeleton) {
  return "tpl-" + hex64(fnv1a64(render_sql(skeleton)));
}

namespace {

bool is_ordering(CompareOp op) { return op != CompareOp::kEq && op != CompareOp::kNe; }

void collect_numeric_columns(const SelectQuery& q, std::set<std::string>& numeric) {
  const Projection& p = q.projection;
  if (!p.star && p.agg != Aggregate::kNone && p.agg != Aggregate::kCount) {
    numeric.insert(p.column.name);
  }
  for (const Predicate& pred : q.predicates) {
    if (is_ordering(pred.op)) numeric.insert(pred.column.name);
    if (pred.has_subquery()) {
      collect_numeric_columns(*std::get<Box<SelectQuery>>(pred.value), numeric);
    } else if (std::get<Literal>(pred.value).kind == Literal::Kind::kNumber) {
      numeric.insert(pred.column.name);
    }
  }
  if (q.order_by) numeric.insert(q.order_by->column.name);
}

class Abstractor {
 public:
  explicit Abstractor(std::set<std::string> numeric) : numeric_(std::move(numeric)) {}

  void run(SelectQuery& q) {
    if (!q.projection.star) column(q.projection.column);
    for (Predicate& pred : q.predicates) {
      column(pred.column);
      if (pred.has_subquery()) {
        run(*std::get<Box<SelectQuery>>(pred.value));
      } else {
        Literal& lit = std::get<Literal>(pred.value);
        if (lit.is_slot()) continue;
        const bool number = lit.kind == Literal::Kind::kNumber;
        lit.slot = (number ? "NUM" : "VAL") + std::to_string(number ? ++nums_ : ++vals_);
        fillers.literals[lit.slot] = lit.text;
        lit.text.clear();
      }
    }
    if (q.order_by) column(q.order_by->column);
    if (q.limit && q.limit->slot.empty()) {
      q.limit->slot = "K" + std::to_string(++limits_);
      fillers.limits[q.limit->slot] = q.limit->value;
      q.limit->value = 1;
    }
  }

  SlotFillers fillers;

 private:
  void column(ColumnRef& ref) {
    if (ref.is_slot()) return;
    auto it = slots_.find(ref.name);
    if (it == slots_.end()) {
      it = slots_.emplace(ref.name, "COL" + std::to_string(slots_.size() + 1)).first;
      fillers.columns[it->second] = ref.name;
    }
    ref.slot_type = numeric_.count(ref.name) ? ColumnType::kNumber : ColumnType::kText;
    ref.slot = it->second;
    ref.name.clear();
  }

  std::set<std::string> numeric_;
  std::map<std::string, std::string> slots_;
  int vals_ = 0;
  int nums_ = 0;
  int limits_ = 0;
};

void fill(SelectQuery& q, const SlotFillers& f) {
  auto fill_column = [&](ColumnRef& ref) {
    if (!ref.is_slot()) return;
    auto it = f.columns.find(ref.slot);
    if (it == f.columns.end()) throw ConfigError("no filler for slot {" + ref.slot + "}");
    ref = ColumnRef{it->second, {}, ColumnType::kText};
  };
  if (!q.projection.star) fill_column(q.projection.column);
  for (Predicate& pred : q.predicates) {
    fill_column(pred.column);
    if (pred.has_subquery()) {
      fill(*std::get<Box<SelectQuery>>(pred.value), f);
      continue;
    }
    Literal& lit = std::get<Literal>(pred.value);
    if (!lit.is_slot()) continue;
    auto it = f.literals.find(lit.slot);
    if (it == f.literals.end()) throw ConfigError("no filler for slot {" + lit.slot + "}");
    lit.text = it->second;
    lit.slot.clear();
  }
  if (q.order_by) fill_column(q.order_by->column);
  if (q.limit && !q.limit->slot.empty()) {
    auto it = f.limits.find(q.limit->slot);
    if (it == f.limits.end()) throw ConfigError("no filler for slot {" + q.limit->slot + "}");
    q.limit->value = it->second;
    q.limit->slot.clear();
  }
}

}  // namespace

TemplateExtraction extract_template(const SelectQuery& query) {
  std::set<std::string> numeric;
  collect_numeric_columns(query, numeric);
  Abstractor abstractor(std::move(numeric));
  SelectQuery skeleton = query;
  abstractor.run(skeleton);
  TemplateExtraction out;
  out.tpl.id = template_id(skeleton);
  out.tpl.skeleton = std::move(skeleton);
  out.fillers = std::move(abstractor.fillers);
  return out;
}

SelectQuery fill_template(const SelectQuery& skeleton, const SlotFillers& fillers) {
  SelectQuery q = skeleton;
  fill(q, fillers);
  return q;
}

SqlTemplate parse_template(std::string id, std::string_view skeleton) {
  SqlTemplate tpl{std::move(id), parse_sql_template(skeleton)};
  std::map<std::string, ColumnType> types;
  for_each_column(tpl.skeleton, [&](const ColumnRef& ref) {
    if (!ref.is_slot()) return;
    auto [it, inserted] = types.emplace(ref.slot, ref.slot_type);
    if (!inserted && it->second != ref.slot_type) {
      throw ConfigError("slot {" + ref.slot + "} used with two types in template '" + tpl.id + "'");
    }
  });
  if (tpl.id.empty()) tpl.id = template_id(tpl.skeleton);
  return tpl;
}

std::vector<SqlTemplate> load_templates(const std::filesystem::path& path) {
  std::vector<SqlTemplate> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      check_keys(record, {"id", "skeleton"});
      out.push_back(parse_template(require_string(record, "id"), require_string(record, "skeleton")));
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw SchemaError(where + "duplicate template id '" + out.back().id + "'");
    }
  });
  return out;
}

void save_templates(const std::filesystem::path& path, std::span<const SqlTemplate> templates) {
  JsonlWriter out(path);
  for (const SqlTemplate& t : templates) out.write(Json{{"id", t.id}, {"skeleton", t.text()}});
  out.close();
}

std::vector<SqlTemplate> extract_templates(std::span<const SelectQuery> queries) {
  std::vector<SqlTemplate> out;
  std::set<std::string> seen;
  for (const SelectQuery& q : queries) {
    TemplateExtraction ex = extract_template(q);
    if (seen.insert(ex.tpl.id).second) out.push_back(std::move(ex.tpl));
  }
  return out;
}

namespace {

struct ColumnSlot {
  std::string name;
  ColumnType type;
};

void collect_literal_slots(const SelectQuery& q,
                           std::vector<std::pair<const Predicate*, const Literal*>>& out) {
  for (const Predicate& pred : q.predicates) {
    if (pred.has_subquery()) {
      collect_literal_slots(*std::get<Box<SelectQuery>>(pred.value), out);
    } else if (std::get<Literal>(pred.value).is_slot()) {
      out.emplace_back(&pred, &std::get<Literal>(pred.value));
    }
  }
}

void collect_limit_slots(const SelectQuery& q, std::vector<std::string>& out) {
  if (q.limit && !q.limit->slot.empty()) out.push_back(q.limit->slot);
  for (const Predicate& pred : q.predicates) {
    if (pred.has_subquery()) collect_limit_slots(*std::get<Box<SelectQuery>>(pred.value), out);
  }
}

}  // namespace

std::optional<SampledSql> instantiate_template(const SqlTemplate& tpl, const Table& table,
                                               std::uint64_t seed, const SamplerConfig& config) {
  Rng rng(seed);
  SlotFillers fillers;

  std::vector<ColumnSlot> slots;
  for_each_column(tpl.skeleton, [&](const ColumnRef& ref) {
    if (!ref.is_slot()) return;
    const bool known = std::any_of(slots.begin(), slots.end(),
                                   [&](const ColumnSlot& s) { return s.name == ref.slot; });
    if (!known) slots.push_back({ref.slot, ref.slot_type});
  });
  std::vector<bool> used(table.num_columns(), false);
  for (const ColumnSlot& slot : slots) {
    std::vector<std::size_t> fits;
    for (std::size_t c = 0; c < table.num_columns(); ++c) {
      if (!used[c] && column_type(table, c) == slot.type) fits.push_back(c);
    }
    if (fits.empty()) return std::nullopt;
    const std::size_t pick = fits[rng.index(fits.size())];
    used[pick] = true;
    fillers.columns[slot.name] = table.header[pick];
  }

  std::vector<std::pair<const Predicate*, const Literal*>> literal_slots;
  collect_literal_slots(tpl.skeleton, literal_slots);
  for (const auto& [pred, lit] : literal_slots) {
    if (fillers.literals.count(lit->slot)) continue;
    const std::string& name =
        pred->column.is_slot() ? fillers.columns.at(pred->column.slot) : pred->column.name;
    const std::size_t col = table.column_index(name);
    if (col == std::string::npos) return std::nullopt;
    const std::string& cell = table.rows[rng.index(table.rows.size())][col];
    if (lit->kind == Literal::Kind::kString) {
      fillers.literals[lit->slot] = cell;
    } else {
      const auto value = parse_number(cell);
      if (!value) return std::nullopt;
      double v = *value;
      if (is_ordering(pred->op)) v += static_cast<double>(rng.index(3)) - 1.0;
      fillers.literals[lit->slot] = format_number(v);
    }
  }

  std::vector<std::string> limit_slots;
  collect_limit_slots(tpl.skeleton, limit_slots);
  const long long cap = std::min<long long>(config.max_limit,
                                            static_cast<long long>(table.rows.size()));
  for (const std::string& slot : limit_slots) {
    if (!fillers.limits.count(slot)) {
      fillers.limits[slot] = 1 + static_cast<long long>(rng.index(static_cast<std::size_t>(cap)));
    }
  }

  const SelectQuery query = fill_template(tpl.skeleton, fillers);
  AnswerList answers;
  try {
    answers = execute_sql(query, table);
  } catch (const ExecutionError&) {
    return std::nullopt;
  }
  if (answers.answers.empty() || answers.answers.size() > config.max_answers) return std::nullopt;
  if (std::any_of(answers.answers.begin(), answers.answers.end(),
                  [](const std::string& a) { return trim(a).empty(); })) {
    return std::nullopt;
  }
  return SampledSql{table.id, tpl.id, render_sql(query), std::move(answers)};
}

SampleResult sample_sql_dataset(std::span<const Table> tables,
                                std::span<const SqlTemplate> templates, std::size_t n,
                                std::uint64_t seed, const SamplerConfig& config,
                                Diagnostics* diag) {
  SampleResult result;
  if (n == 0) return result;
  if (tables.empty() || templates.empty()) {
    result.partial = true;
    if (diag) diag->warn("sample-sql: no tables or no templates");
    return result;
  }
  const std::size_t combos = tables.size() * templates.size();
  const std::size_t budget = std::max(n * config.attempts_per_record, combos);
  for (std::size_t a = 0; a < budget && result.records.size() < n; ++a) {
    const std::size_t combo = a % combos;
    const Table& table = tables[combo % tables.size()];
    const SqlTemplate& tpl = templates[combo / tables.size()];
    ++result.attempts;
    if (auto sample = instantiate_template(tpl, table, derive_seed(seed, a), config)) {
      result.records.push_back(std::move(*sample));
    }
  }
  if (result.records.size() < n) {
    result.partial = true;
    if (diag) {
      diag->warn("sample-sql: accepted " + std::to_string(result.records.size()) + " of " +
                 std::to_string(n) + " requested records after " +
                 std::to_string(result.attempts) + " attempts");
      diag->count("sql.shortfall", n - result.records.size());
    }
  }
  return result;
}

Json sql_record_to_json(const SampledSql& record) {
  return Json{{"task", kTaskSqlQa},
              {"table_id", record.table_id},
              {"sql", record.sql},
              {"answers", record.answers.answers},
              {"template_id", record.template_id}};
}

SampledSql parse_sql_record(const Json& record) {
  check_keys(record, {"task", "table_id", "sql", "answers", "template_id"});
  if (require_string(record, "task") != kTaskSqlQa) throw SchemaError("task is not sql-qa");
  SampledSql out;
  out.table_id = require_string(record, "table_id");
  out.sql = require_string(record, "sql");
  try {
    parse_sql(out.sql);
  } catch (const ParseError& e) {
    throw SchemaError(std::string("sql-qa record holds unparseable sql: ") + e.what());
  }
  out.answers.answers = require_string_array(record, "answers");
  if (out.answers.answers.empty()) throw SchemaError("sql-qa record has no answers");
  if (record.contains("template_id")) out.template_id = require_string(record, "template_id");
  return out;
}

}  // namespace tqforge
