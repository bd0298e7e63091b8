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
#ifndef TQFORGE_RECORDS_H_
#define TQFORGE_RECORDS_H_

#include <string>
#include <string_view>

#include "tqforge/jsonl.h"
#include "tqforge/table.h"

namespace tqforge {

// Input table record: {"id", "doc_id", "header": [string], "rows": [[string]]}.
Json table_to_json(const Table& table);
// Throws SchemaError on missing/ill-typed fields and StructuralError on
// ragged or empty tables.
Table table_from_json(const Json& record);

// Task tags carried by every training record.
inline constexpr std::string_view kTaskNaturalMask = "natural-mask";
inline constexpr std::string_view kTaskSyntheticQa = "synthetic-qa";
inline constexpr std::string_view kTaskSqlQa = "sql-qa";

enum class Task { kNaturalMask, kSyntheticQa, kSqlQa };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

// Checks a record against the schema named by its "task" field, in either
// its stream form or its mixture form (with "input"/"output" added).
// Throws SchemaError.
Task validate_record(const Json& record);

}  // namespace tqforge

#endif  // TQFORGE_RECORDS_H_
