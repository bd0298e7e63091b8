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

#include "tqforge/records.h"

#include "tqforge/error.h"
#include "tqforge/masking.h"
#include "tqforge/sql.h"

namespace tqforge {

Json table_to_json(const Table& table) {
  return Json{{"id", table.id}, {"doc_id", table.doc_id}, {"header", table.header},
              {"rows", table.rows}};
}

Table table_from_json(const Json& record) {
  if (!record.is_object()) throw SchemaError("table record is not an object");
  Table table;
  table.id = require_string(record, "id");
  if (table.id.empty()) throw SchemaError("empty table id");
  table.doc_id = require_string(record, "doc_id");
  table.header = require_string_array(record, "header");
  const Json& rows = require(record, "rows");
  if (!rows.is_array()) throw SchemaError("field 'rows' is not an array");
  for (const Json& row : rows) {
    if (!row.is_array()) throw SchemaError("field 'rows' holds a non-array row");
    std::vector<std::string>& out = table.rows.emplace_back();
    for (const Json& cell : row) {
      if (!cell.is_string()) throw SchemaError("field 'rows' holds a non-string cell");
      out.push_back(cell.get<std::string>());
    }
  }
  validate_table(table);
  return table;
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kNaturalMask: return kTaskNaturalMask;
    case Task::kSyntheticQa: return kTaskSyntheticQa;
    case Task::kSqlQa: return kTaskSqlQa;
  }
  return {};
}

Task parse_task(std::string_view name) {
  if (name == kTaskNaturalMask) return Task::kNaturalMask;
  if (name == kTaskSyntheticQa) return Task::kSyntheticQa;
  if (name == kTaskSqlQa) return Task::kSqlQa;
  throw SchemaError("unknown task '" + std::string(name) + "'");
}

namespace {

void require_answers(const Json& record) {
  if (require_string_array(record, "answers").empty()) throw SchemaError("empty answer list");
}

// Mixture records carry "input" and "output" on top of the stream schema.
void check_mixture_fields(const Json& record) {
  const bool has_input = record.contains("input");
  const bool has_output = record.contains("output");
  if (has_input != has_output) throw SchemaError("mixture record needs both input and output");
  if (has_input) {
    require_string(record, "input");
    require_string(record, "output");
  }
}

}  // namespace

Task validate_record(const Json& record) {
  if (!record.is_object()) throw SchemaError("record is not an object");
  const Task task = parse_task(require_string(record, "task"));
  try {
    switch (task) {
      case Task::kNaturalMask: {
        Json body = record;
        if (body.contains("output")) {
          if (require_string(body, "output") != require_string(body, "target")) {
            throw SchemaError("output differs from target");
          }
          body.erase("output");
        }
        parse_mask_record(body);
        break;
      }
      case Task::kSyntheticQa:
        check_keys(record, {"task", "table_id", "question", "answers", "input", "output"});
        require_string(record, "table_id");
        if (require_string(record, "question").empty()) throw SchemaError("empty question");
        require_answers(record);
        check_mixture_fields(record);
        break;
      case Task::kSqlQa:
        check_keys(record, {"task", "table_id", "sql", "answers", "template_id", "input", "output"});
        require_string(record, "table_id");
        parse_sql(require_string(record, "sql"));
        require_answers(record);
        if (record.contains("template_id")) require_string(record, "template_id");
        check_mixture_fields(record);
        break;
    }
  } catch (const ParseError& e) {
    throw SchemaError(std::string("invalid sql: ") + e.what());
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return task;
}

}  // namespace tqforge
