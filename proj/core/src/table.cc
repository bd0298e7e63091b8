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
#include "tqforge/table.h"

#include "tqforge/error.h"

namespace tqforge {

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  return std::string::npos;
}

void validate_table(const Table& table) {
  if (table.header.empty()) {
    throw StructuralError("table '" + table.id + "' has no columns");
  }
  if (table.rows.empty()) {
    throw StructuralError("table '" + table.id + "' has no data rows");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != table.header.size()) {
      throw StructuralError("table '" + table.id + "' row " + std::to_string(i + 1) + " has " +
                            std::to_string(table.rows[i].size()) + " cells, expected " +
                            std::to_string(table.header.size()));
    }
  }
}

std::string escape_cell(std::string_view cell) {
  std::string out;
  out.reserve(cell.size());
  for (char c : cell) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

LinearizedTable linearize_table_with_spans(const Table& table) {
  validate_table(table);
  LinearizedTable out;
  out.cell_spans.resize(table.num_total_rows());
  auto append_row = [&](const std::vector<std::string>& cells, std::vector<CellSpan>& spans) {
    spans.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j > 0) out.text += " | ";
      const std::size_t start = out.text.size();
      out.text += escape_cell(cells[j]);
      spans.push_back({start, out.text.size()});
    }
  };
  out.text = "col: ";
  append_row(table.header, out.cell_spans[0]);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out.text += " row " + std::to_string(i + 1) + ": ";
    append_row(table.rows[i], out.cell_spans[i + 1]);
  }
  return out;
}

std::string linearize_table(const Table& table) { return linearize_table_with_spans(table).text; }

std::string build_model_input(std::string_view context, const Table& table) {
  if (context.empty()) return linearize_table(table);
  std::string out(context);
  out += ' ';
  out += linearize_table(table);
  return out;
}

std::vector<std::string> split_answers(std::string_view joined) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = joined.find(", ", pos);
    if (next == std::string_view::npos) {
      parts.emplace_back(joined.substr(pos));
      return parts;
    }
    parts.emplace_back(joined.substr(pos, next - pos));
    pos = next + 2;
  }
}

JoinedAnswers join_answers(const AnswerList& list) {
  if (list.answers.empty()) throw StructuralError("cannot join an empty answer list");
  JoinedAnswers out;
  for (std::size_t i = 0; i < list.answers.size(); ++i) {
    if (i > 0) out.text += ", ";
    out.text += list.answers[i];
  }
  out.ambiguous = split_answers(out.text) != list.answers;
  return out;
}

}  // namespace tqforge
