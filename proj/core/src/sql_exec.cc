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

#include "tqforge/sql_exec.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "tqforge/error.h"
#include "tqforge/text.h"

namespace tqforge {

std::optional<double> parse_number(std::string_view cell) {
  std::string_view s = trim(cell);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  static constexpr std::array<std::string_view, 5> kCurrency = {"US$", "$", "€", "£", "¥"};
  for (std::string_view sym : kCurrency) {
    if (s.substr(0, sym.size()) == sym) {
      s.remove_prefix(sym.size());
      break;
    }
  }
  if (!negative && !s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  std::string digits;
  bool seen_digit = false;
  bool seen_point = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
    } else if (c == ',' && !seen_point && seen_digit && i + 1 < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    } else if (c == '.' && !seen_point && i + 1 < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      digits += c;
      seen_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return negative ? -value : value;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) throw ExecutionError("number out of printable range");
  return std::string(buf, ptr);
}

ColumnType column_type(const Table& table, std::size_t col) {
  for (const auto& row : table.rows) {
    if (!parse_number(row[col])) return ColumnType::kText;
  }
  return ColumnType::kNumber;
}

namespace {

std::size_t resolve(const ColumnRef& ref, const Table& table) {
  if (ref.is_slot()) throw ExecutionError("cannot execute a template slot {" + ref.slot + "}");
  const std::size_t idx = table.column_index(ref.name);
  if (idx == std::string::npos) {
    throw ExecutionError("unknown column '" + ref.name + "' in table '" + table.id + "'");
  }
  return idx;
}

bool compare(std::string_view cell, CompareOp op, std::string_view value) {
  const auto a = parse_number(cell);
  const auto b = parse_number(value);
  if (a && b) {
    switch (op) {
      case CompareOp::kEq: return *a == *b;
      case CompareOp::kNe: return *a != *b;
      case CompareOp::kLt: return *a < *b;
      case CompareOp::kGt: return *a > *b;
      case CompareOp::kLe: return *a <= *b;
      case CompareOp::kGe: return *a >= *b;
    }
  }
  if (op == CompareOp::kEq) return cell == value;
  if (op == CompareOp::kNe) return cell != value;
  throw ExecutionError("cannot apply '" + std::string(compare_symbol(op)) + "' to '" +
                       std::string(cell) + "' and '" + std::string(value) + "'");
}

}  // namespace

AnswerList execute_sql(const SelectQuery& query, const Table& table) {
  struct Condition {
    std::size_t col;
    CompareOp op;
    std::string value;
  };
  std::vector<Condition> conditions;
  for (const Predicate& pred : query.predicates) {
    Condition c{resolve(pred.column, table), pred.op, {}};
    if (pred.has_subquery()) {
      const AnswerList sub = execute_sql(*std::get<Box<SelectQuery>>(pred.value), table);
      if (sub.answers.size() != 1) {
        throw ExecutionError("subquery returned " + std::to_string(sub.answers.size()) +
                             " values, expected 1");
      }
      c.value = sub.answers.front();
    } else {
      const Literal& lit = std::get<Literal>(pred.value);
      if (lit.is_slot()) throw ExecutionError("cannot execute a template slot {" + lit.slot + "}");
      c.value = lit.text;
    }
    conditions.push_back(std::move(c));
  }

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool keep = true;
    for (const Condition& c : conditions) {
      keep = compare(table.rows[r][c.col], c.op, c.value) && keep;
    }
    if (keep) rows.push_back(r);
  }

  if (query.order_by) {
    const std::size_t col = resolve(query.order_by->column, table);
    std::vector<std::optional<double>> keys;
    bool numeric = true;
    for (std::size_t r : rows) {
      keys.push_back(parse_number(table.rows[r][col]));
      numeric = numeric && keys.back().has_value();
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    const bool desc = query.order_by->descending;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (numeric) return desc ? *keys[x] > *keys[y] : *keys[x] < *keys[y];
      const std::string& a = table.rows[rows[x]][col];
      const std::string& b = table.rows[rows[y]][col];
      return desc ? a > b : a < b;
    });
    std::vector<std::size_t> sorted;
    sorted.reserve(rows.size());
    for (std::size_t i : order) sorted.push_back(rows[i]);
    rows = std::move(sorted);
  }
  if (query.limit) {
    if (!query.limit->slot.empty()) throw ExecutionError("cannot execute a template slot");
    if (static_cast<long long>(rows.size()) > query.limit->value) {
      rows.resize(static_cast<std::size_t>(query.limit->value));
    }
  }

  AnswerList out;
  const Projection& proj = query.projection;
  if (proj.agg == Aggregate::kCount && proj.star) {
    out.answers.push_back(std::to_string(rows.size()));
    return out;
  }
  const std::size_t col = resolve(proj.column, table);
  switch (proj.agg) {
    case Aggregate::kNone:
      for (std::size_t r : rows) out.answers.push_back(table.rows[r][col]);
      return out;
    case Aggregate::kCount: {
      const auto n = std::count_if(rows.begin(), rows.end(),
                                   [&](std::size_t r) { return !trim(table.rows[r][col]).empty(); });
      out.answers.push_back(std::to_string(n));
      return out;
    }
    case Aggregate::kSum:
    case Aggregate::kAvg: {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t r : rows) {
        const std::string& cell = table.rows[r][col];
        if (trim(cell).empty()) continue;
        const auto v = parse_number(cell);
        if (!v) throw ExecutionError("non-numeric value '" + cell + "' in " +
                                     std::string(aggregate_keyword(proj.agg)));
        sum += *v;
        ++n;
      }
      if (n == 0) return out;
      out.answers.push_back(
          format_number(proj.agg == Aggregate::kSum ? sum : sum / static_cast<double>(n)));
      return out;
    }
    case Aggregate::kMin:
    case Aggregate::kMax: {
      std::vector<std::size_t> present;
      bool numeric = true;
      for (std::size_t r : rows) {
        if (trim(table.rows[r][col]).empty()) continue;
        present.push_back(r);
        numeric = numeric && parse_number(table.rows[r][col]).has_value();
      }
      if (present.empty()) return out;
      const bool want_max = proj.agg == Aggregate::kMax;
      std::size_t best = present.front();
      for (std::size_t r : present) {
        const std::string& a = table.rows[r][col];
        const std::string& b = table.rows[best][col];
        bool better;
        if (numeric) {
          better = want_max ? *parse_number(a) > *parse_number(b) : *parse_number(a) < *parse_number(b);
        } else {
          better = want_max ? a > b : a < b;
        }
        if (better) best = r;
      }
      out.answers.push_back(table.rows[best][col]);
      return out;
    }
  }
  return out;
}

}  // namespace tqforge
