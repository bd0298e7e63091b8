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
#ifndef TQFORGE_SQL_H_
#define TQFORGE_SQL_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tqforge {

// Grammar (FROM is implicit: every query runs against one table):
//
//   query      := SELECT projection [WHERE predicate {AND predicate}]
//                 [ORDER BY column (ASC | DESC)] [LIMIT integer]
//   projection := column | agg '(' column ')' | COUNT '(' '*' ')'
//   agg        := COUNT | SUM | AVG | MIN | MAX
//   predicate  := column op literal | column '=' '(' query ')'
//   op         := '=' | '!=' | '<' | '>' | '<=' | '>='
//   column     := identifier | `quoted identifier`
//   literal    := number | 'string'
//
// Subqueries do not nest further. Templates additionally accept slots in
// place of columns ({COL1:text}), literals ({VAL1}, {NUM1}) and the
// limit ({K1}).

enum class Aggregate { kNone, kCount, kSum, kAvg, kMin, kMax };
enum class CompareOp { kEq, kNe, kLt, kGt, kLe, kGe };
enum class ColumnType { kText, kNumber };

std::string_view aggregate_keyword(Aggregate agg);
std::string_view compare_symbol(CompareOp op);
std::string_view column_type_name(ColumnType type);

struct ColumnRef {
  std::string name;
  std::string slot;  // "COL<n>" in templates, empty otherwise
  ColumnType slot_type = ColumnType::kText;

  bool is_slot() const { return !slot.empty(); }
  bool operator==(const ColumnRef&) const = default;
};

struct Literal {
  enum class Kind { kNumber, kString };
  Kind kind = Kind::kString;
  std::string text;  // number lexeme, or the unquoted string value
  std::string slot;  // "VAL<n>" (string) or "NUM<n>" (number) in templates

  bool is_slot() const { return !slot.empty(); }
  bool operator==(const Literal&) const = default;
};

// Copyable owning pointer, so that queries keep value semantics.
template <typename T>
class Box {
 public:
  explicit Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }
  bool operator==(const Box& other) const { return *ptr_ == *other.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct SelectQuery;

struct Predicate {
  ColumnRef column;
  CompareOp op = CompareOp::kEq;
  std::variant<Literal, Box<SelectQuery>> value;

  bool has_subquery() const { return std::holds_alternative<Box<SelectQuery>>(value); }
  bool operator==(const Predicate&) const = default;
};

struct Projection {
  Aggregate agg = Aggregate::kNone;
  bool star = false;  // COUNT(*)
  ColumnRef column;
  bool operator==(const Projection&) const = default;
};

struct OrderBy {
  ColumnRef column;
  bool descending = false;
  bool operator==(const OrderBy&) const = default;
};

struct LimitClause {
  long long value = 1;
  std::string slot;  // "K<n>" in templates
  bool operator==(const LimitClause&) const = default;
};

struct SelectQuery {
  Projection projection;
  std::vector<Predicate> predicates;
  std::optional<OrderBy> order_by;
  std::optional<LimitClause> limit;
  bool operator==(const SelectQuery&) const = default;
};

struct SqlQuery {
  std::string raw;
  SelectQuery ast;
};

// Throws ParseError with the byte offset of the offending token.
SqlQuery parse_sql(std::string_view text);
// Same grammar with slots allowed.
SelectQuery parse_sql_template(std::string_view text);

// Canonical text: keywords upper case, single spaces, "COUNT(*)",
// subqueries as "( SELECT ... )".
std::string render_sql(const SelectQuery& query);

bool contains_slots(const SelectQuery& query);

// Calls fn for every column reference, outer query first.
void for_each_column(const SelectQuery& query, const std::function<void(const ColumnRef&)>& fn);

}  // namespace tqforge

#endif  // TQFORGE_SQL_H_
