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
#ifndef TQFORGE_TABLE_H_
#define TQFORGE_TABLE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tqforge {

// A relational table: one header row and at least one data row, all of
// the same width. Row 0 in cell coordinates refers to the header.
struct Table {
  std::string id;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string doc_id;

  std::size_t num_columns() const { return header.size(); }
  std::size_t num_data_rows() const { return rows.size(); }
  // Header included.
  std::size_t num_total_rows() const { return rows.size() + 1; }

  const std::string& cell(std::size_t row, std::size_t col) const {
    return row == 0 ? header[col] : rows[row - 1][col];
  }

  // Index of the first header cell equal to name, or npos.
  std::size_t column_index(std::string_view name) const;

  bool operator==(const Table&) const = default;
};

// Throws StructuralError when the table is empty or ragged.
void validate_table(const Table& table);

struct CellSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct LinearizedTable {
  std::string text;
  // cell_spans[row][col], row 0 is the header; byte offsets into text.
  std::vector<std::vector<CellSpan>> cell_spans;
};

// "|" inside a cell becomes "\|" so that separators stay unambiguous.
std::string escape_cell(std::string_view cell);

// "col: h1 | h2 row 1: c11 | c12 row 2: ..."
LinearizedTable linearize_table_with_spans(const Table& table);
std::string linearize_table(const Table& table);

// context + " " + linearized table; an empty context yields the table alone.
std::string build_model_input(std::string_view context, const Table& table);

struct AnswerList {
  std::vector<std::string> answers;
  bool operator==(const AnswerList&) const = default;
};

struct JoinedAnswers {
  std::string text;
  // Splitting text on ", " does not give back the original list.
  bool ambiguous = false;
};

JoinedAnswers join_answers(const AnswerList& list);
std::vector<std::string> split_answers(std::string_view joined);

}  // namespace tqforge

#endif  // TQFORGE_TABLE_H_
