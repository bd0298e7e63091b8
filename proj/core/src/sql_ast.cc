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

#include <cctype>

#include "tqforge/sql.h"

namespace tqforge {

std::string_view aggregate_keyword(Aggregate agg) {
  switch (agg) {
    case Aggregate::kNone: return "";
    case Aggregate::kCount: return "COUNT";
    case Aggregate::kSum: return "SUM";
    case Aggregate::kAvg: return "AVG";
    case Aggregate::kMin: return "MIN";
    case Aggregate::kMax: return "MAX";
  }
  return "";
}

std::string_view compare_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kGt: return ">";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGe: return ">=";
  }
  return "=";
}

std::string_view column_type_name(ColumnType type) {
  return type == ColumnType::kNumber ? "number" : "text";
}

bool is_sql_keyword(std::string_view word);  // sql_parser.cc

namespace {

bool is_bare_identifier(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
    return false;
  }
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return !is_sql_keyword(name);
}

std::string render_column(const ColumnRef& col) {
  if (col.is_slot()) {
    return "{" + col.slot + ":" + std::string(column_type_name(col.slot_type)) + "}";
  }
  if (is_bare_identifier(col.name)) return col.name;
  std::string out = "`";
  for (char c : col.name) {
    if (c == '`') out += '`';
    out += c;
  }
  return out + "`";
}

std::string render_literal(const Literal& lit) {
  if (lit.is_slot()) return "{" + lit.slot + "}";
  if (lit.kind == Literal::Kind::kNumber) return lit.text;
  std::string out = "'";
  for (char c : lit.text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string render_sql(const SelectQuery& query) {
  std::string out = "SELECT ";
  const Projection& p = query.projection;
  if (p.agg == Aggregate::kNone) {
    out += render_column(p.column);
  } else {
    out += aggregate_keyword(p.agg);
    out += "(";
    out += p.star ? "*" : render_column(p.column);
    out += ")";
  }
  for (std::size_t i = 0; i < query.predicates.size(); ++i) {
    const Predicate& pred = query.predicates[i];
    out += i == 0 ? " WHERE " : " AND ";
    out += render_column(pred.column);
    out += " ";
    out += compare_symbol(pred.op);
    out += " ";
    if (pred.has_subquery()) {
      out += "( " + render_sql(*std::get<Box<SelectQuery>>(pred.value)) + " )";
    } else {
      out += render_literal(std::get<Literal>(pred.value));
    }
  }
  if (query.order_by) {
    out += " ORDER BY " + render_column(query.order_by->column);
    out += query.order_by->descending ? " DESC" : " ASC";
  }
  if (query.limit) {
    out += " LIMIT ";
    out += query.limit->slot.empty() ? std::to_string(query.limit->value)
                                     : "{" + query.limit->slot + "}";
  }
  return out;
}

void for_each_column(const SelectQuery& query, const std::function<void(const ColumnRef&)>& fn) {
  if (!query.projection.star) fn(query.projection.column);
  for (const Predicate& pred : query.predicates) {
    fn(pred.column);
    if (pred.has_subquery()) for_each_column(*std::get<Box<SelectQuery>>(pred.value), fn);
  }
  if (query.order_by) fn(query.order_by->column);
}

bool contains_slots(const SelectQuery& query) {
  bool found = query.limit && !query.limit->slot.empty();
  for_each_column(query, [&](const ColumnRef& c) { found = found || c.is_slot(); });
  for (const Predicate& pred : query.predicates) {
    if (pred.has_subquery()) {
      found = found || contains_slots(*std::get<Box<SelectQuery>>(pred.value));
    } else {
      found = found || std::get<Literal>(pred.value).is_slot();
    }
  }
  return found;
}

}  // namespace tqforge
