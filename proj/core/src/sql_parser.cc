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

#include <algorithm>
#include <array>
#include <cctype>

#include "tqforge/error.h"
#include "tqforge/sql.h"
#include "tqforge/text.h"

namespace tqforge {

namespace {

constexpr std::array<std::string_view, 24> kKeywords = {
    "SELECT", "WHERE", "AND", "ORDER", "BY", "ASC", "DESC", "LIMIT",
    "COUNT",  "SUM",   "AVG", "MIN",   "MAX", "FROM", "OR", "NOT",
    "GROUP",  "HAVING", "JOIN", "NULL", "IS", "IN", "LIKE", "AS"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

struct Lexeme {
  enum class Kind { kWord, kQuotedIdent, kNumber, kString, kSlot, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Lexeme> lex(std::string_view s) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  auto digit = [&](std::size_t k) {
    return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]));
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Lexeme::Kind::kWord, std::string(s.substr(start, i - start)), start});
    } else if (digit(i) || (c == '-' && digit(i + 1))) {
      ++i;
      while (digit(i)) ++i;
      if (i < s.size() && s[i] == '.') {
        if (!digit(i + 1)) throw ParseError("malformed number", start);
        ++i;
        while (digit(i)) ++i;
      }
      if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        throw ParseError("malformed number", start);
      }
      out.push_back({Lexeme::Kind::kNumber, std::string(s.substr(start, i - start)), start});
    } else if (c == '\'' || c == '`') {
      const char quote = c;
      std::string value;
      ++i;
      while (true) {
        if (i >= s.size()) {
          throw ParseError(quote == '\'' ? "unterminated string" : "unterminated identifier", start);
        }
        if (s[i] == quote) {
          if (i + 1 < s.size() && s[i + 1] == quote) {
            value += quote;
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        value += s[i++];
      }
      if (quote == '`' && value.empty()) throw ParseError("empty quoted identifier", start);
      out.push_back({quote == '\'' ? Lexeme::Kind::kString : Lexeme::Kind::kQuotedIdent,
                     std::move(value), start});
    } else if (c == '{') {
      const std::size_t close = s.find('}', i);
      if (close == std::string_view::npos) throw ParseError("unterminated slot", start);
      out.push_back({Lexeme::Kind::kSlot, std::string(s.substr(i + 1, close - i - 1)), start});
      i = close + 1;
    } else {
      std::string sym;
      if (i + 1 < s.size()) {
        const std::string two(s.substr(i, 2));
        if (two == "!=" || two == "<=" || two == ">=" || two == "<>") sym = two == "<>" ? "!=" : two;
      }
      if (!sym.empty()) {
        i += 2;
      } else if (c == '(' || c == ')' || c == '*' || c == '=' || c == '<' || c == '>' || c == ',') {
        sym = std::string(1, c);
        ++i;
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", start);
      }
      out.push_back({Lexeme::Kind::kSymbol, sym, start});
    }
  }
  out.push_back({Lexeme::Kind::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, bool allow_slots)
      : tokens_(lex(text)), allow_slots_(allow_slots) {}

  SelectQuery parse() {
    SelectQuery q = parse_query(0);
    if (peek().kind != Lexeme::Kind::kEnd) fail("unexpected '" + peek().text + "'");
    return q;
  }

 private:
  const Lexeme& peek() const { return tokens_[pos_]; }
  const Lexeme& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, peek().pos); }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Lexeme::Kind::kWord && upper(peek().text) == kw;
  }
  bool at_symbol(std::string_view sym) const {
    return peek().kind == Lexeme::Kind::kSymbol && peek().text == sym;
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("expected " + std::string(kw));
    next();
  }
  void expect_symbol(std::string_view sym) {
    if (!at_symbol(sym)) fail("expected '" + std::string(sym) + "'");
    next();
  }

  std::string parse_slot_name(std::string_view prefix) {
    const Lexeme& tok = peek();
    if (!allow_slots_) fail("slots are only allowed in templates");
    std::string name = tok.text;
    std::string type;
    if (const auto colon = name.find(':'); colon != std::string::npos) {
      type = name.substr(colon + 1);
      name = name.substr(0, colon);
    }
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0 ||
        !std::all_of(name.begin() + static_cast<long>(prefix.size()), name.end(),
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      fail("expected a " + std::string(prefix) + " slot, found {" + tok.text + "}");
    }
    slot_type_ = type;
    next();
    return name;
  }

  ColumnRef parse_column() {
    ColumnRef col;
    const Lexeme& tok = peek();
    if (tok.kind == Lexeme::Kind::kSlot) {
      col.slot = parse_slot_name("COL");
      if (slot_type_ == "number") {
        col.slot_type = ColumnType::kNumber;
      } else if (slot_type_ == "text") {
        col.slot_type = ColumnType::kText;
      } else {
        throw ParseError("column slot needs a :text or :number type", tok.pos);
      }
      return col;
    }
    if (tok.kind == Lexeme::Kind::kQuotedIdent) {
      col.name = tok.text;
    } else if (tok.kind == Lexeme::Kind::kWord && !is_keyword(tok.text)) {
      col.name = tok.text;
    } else {
      fail("expected a column name");
    }
    next();
    return col;
  }

  static bool is_keyword(std::string_view word) {
    const std::string u = upper(word);
    return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
  }

  Projection parse_projection() {
    Projection p;
    static constexpr std::array<std::pair<std::string_view, Aggregate>, 5> kAggs = {{
        {"COUNT", Aggregate::kCount}, {"SUM", Aggregate::kSum}, {"AVG", Aggregate::kAvg},
        {"MIN", Aggregate::kMin}, {"MAX", Aggregate::kMax}}};
    for (const auto& [kw, agg] : kAggs) {
      if (at_keyword(kw)) {
        next();
        p.agg = agg;
        expect_symbol("(");
        if (at_symbol("*")) {
          if (agg != Aggregate::kCount) fail("only COUNT accepts '*'");
          next();
          p.star = true;
        } else {
          p.column = parse_column();
        }
        expect_symbol(")");
        return p;
      }
    }
    p.column = parse_column();
    return p;
  }

  CompareOp parse_op() {
    static constexpr std::array<std::pair<std::string_view, CompareOp>, 6> kOps = {{
        {"=", CompareOp::kEq}, {"!=", CompareOp::kNe}, {"<", CompareOp::kLt},
        {">", CompareOp::kGt}, {"<=", CompareOp::kLe}, {">=", CompareOp::kGe}}};
    for (const auto& [sym, op] : kOps) {
      if (at_symbol(sym)) {
        next();
        return op;
      }
    }
    fail("expected a comparison operator");
  }

  Predicate parse_predicate(int depth) {
    Predicate pred;
    pred.column = parse_column();
    const std::size_t op_pos = peek().pos;
    pred.op = parse_op();
    const Lexeme& tok = peek();
    if (at_symbol("(")) {
      if (pred.op != CompareOp::kEq) throw ParseError("subqueries require '='", op_pos);
      if (depth > 0) fail("subqueries cannot be nested");
      next();
      pred.value = Box<SelectQuery>(parse_query(depth + 1));
      expect_symbol(")");
      return pred;
    }
    Literal lit;
    if (tok.kind == Lexeme::Kind::kNumber) {
      lit.kind = Literal::Kind::kNumber;
      lit.text = tok.text;
      next();
    } else if (tok.kind == Lexeme::Kind::kString) {
      lit.kind = Literal::Kind::kString;
      lit.text = tok.text;
      next();
    } else if (tok.kind == Lexeme::Kind::kSlot) {
      const bool is_num = tok.text.rfind("NUM", 0) == 0;
      lit.slot = parse_slot_name(is_num ? "NUM" : "VAL");
      if (!slot_type_.empty()) throw ParseError("literal slots take no type", tok.pos);
      lit.kind = is_num ? Literal::Kind::kNumber : Literal::Kind::kString;
    } else {
      fail("expected a literal or subquery");
    }
    pred.value = std::move(lit);
    return pred;
  }

  SelectQuery parse_query(int depth) {
    SelectQuery q;
    expect_keyword("SELECT");
    q.projection = parse_projection();
    if (at_keyword("WHERE")) {
      next();
      q.predicates.push_back(parse_predicate(depth));
      while (at_keyword("AND")) {
        next();
        q.predicates.push_back(parse_predicate(depth));
      }
      const auto subqueries = std::count_if(q.predicates.begin(), q.predicates.end(),
                                            [](const Predicate& p) { return p.has_subquery(); });
      if (subqueries > 1) fail("at most one subquery per query");
    }
    if (at_keyword("ORDER")) {
      next();
      expect_keyword("BY");
      OrderBy order;
      order.column = parse_column();
      if (at_keyword("ASC")) {
        order.descending = false;
      } else if (at_keyword("DESC")) {
        order.descending = true;
      } else {
        fail("expected ASC or DESC");
      }
      next();
      q.order_by = std::move(order);
    }
    if (at_keyword("LIMIT")) {
      next();
      LimitClause limit;
      const Lexeme& tok = peek();
      if (tok.kind == Lexeme::Kind::kSlot) {
        limit.slot = parse_slot_name("K");
        if (!slot_type_.empty()) throw ParseError("limit slots take no type", tok.pos);
      } else if (tok.kind == Lexeme::Kind::kNumber &&
                 std::all_of(tok.text.begin(), tok.text.end(),
                             [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        if (tok.text.size() > 9) fail("LIMIT out of range");
        limit.value = std::stoll(tok.text);
        if (limit.value < 1) fail("LIMIT must be at least 1");
        next();
      } else {
        fail("expected a positive integer after LIMIT");
      }
      q.limit = std::move(limit);
    }
    return q;
  }

  std::vector<Lexeme> tokens_;
  std::size_t pos_ = 0;
  bool allow_slots_;
  std::string slot_type_;
};

}  // namespace

bool is_sql_keyword(std::string_view word) {
  const std::string u = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

SqlQuery parse_sql(std::string_view text) {
  return SqlQuery{std::string(text), Parser(text, false).parse()};
}

SelectQuery parse_sql_template(std::string_view text) { return Parser(text, true).parse(); }

}  // namespace tqforge
