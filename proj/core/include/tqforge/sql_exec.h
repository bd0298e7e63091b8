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

#ifndef TQFORGE_SQL_EXEC_H_
#define TQFORGE_SQL_EXEC_H_

#include <optional>
#include <string>
#include <string_view>

#include "tqforge/sql.h"
#include "tqforge/table.h"

namespace tqforge {

// Parses a cell as a number after dropping surrounding whitespace, a
// leading currency sign ($, US$, €, £, ¥) and thousands separators.
// "$114,844,116" -> 114844116. Exponents, percent signs and ranges are
// not numbers.
std::optional<double> parse_number(std::string_view cell);

// Shortest fixed-notation decimal that reads back as the same double;
// integral values carry no fractional part and -0 prints as "0".
std::string format_number(double value);

// kNumber when every data cell of the column parses as a number.
ColumnType column_type(const Table& table, std::size_t col);

// Row-scan evaluation: filter rows by all predicates, then ORDER BY and
// LIMIT, then project or aggregate. Values compare numerically when both
// sides parse as numbers; otherwise only '=' and '!=' apply, as exact
// string comparisons. Every predicate is evaluated on every row.
//
// Throws ExecutionError for unknown columns, ordering comparisons between
// non-numbers, non-numeric SUM/AVG inputs, and subqueries that do not
// yield exactly one value. An empty result is an empty list.
AnswerList execute_sql(const SelectQuery& query, const Table& table);

}  // namespace tqforge

#endif  // TQFORGE_SQL_EXEC_H_
