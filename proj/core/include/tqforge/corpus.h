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
#ifndef TQFORGE_CORPUS_H_
#define TQFORGE_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/error.h"
#include "tqforge/table.h"
#include "tqforge/text.h"

namespace tqforge {

struct Sentence {
  std::string text;
  std::vector<Token> tokens;  // offsets relative to text
  // Provenance: containing document and position within it.
  std::string doc_id;
  std::size_t index = 0;
  std::size_t doc_start = 0;  // byte offset of text in the document

  std::size_t num_words() const;
};

struct Document {
  std::string id;
  std::string url;
  std::string text;
  std::vector<Sentence> sentences;
};

struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

// Rule-based splitter: a boundary is '.', '!' or '?' (plus any closing
// quotes or brackets) followed by whitespace and an uppercase letter,
// unless the word before the period is a known abbreviation or a single
// initial. Returned spans are trimmed and in document order.
std::vector<SentenceSpan> split_sentences(std::string_view text);

Sentence make_sentence(std::string_view doc_text, SentenceSpan span, std::string doc_id,
                       std::size_t index);

// Segments the text; fills document.sentences.
Document make_document(std::string id, std::string url, std::string text);

// Minimum number of word tokens a sentence needs for its document to be
// considered meaningful.
inline constexpr std::size_t kMinMeaningfulWords = 4;
bool has_meaningful_sentence(const Document& doc);

class CorpusStore {
 public:
  // Returns false if the id is already present.
  bool add_table(Table table);
  bool add_document(Document doc);

  const Table* find_table(std::string_view id) const;
  const Document* find_document(std::string_view id) const;

  const std::map<std::string, Table, std::less<>>& tables() const { return tables_; }
  const std::map<std::string, Document, std::less<>>& documents() const { return documents_; }
  // Tables linked to a document, in id order.
  std::vector<std::string> tables_in_document(std::string_view doc_id) const;

  // Ids of tables whose doc_id has no document.
  std::vector<std::string> dangling_tables() const;
  // Removes dangling tables; returns how many were removed.
  std::size_t drop_dangling_tables(Diagnostics* diag);

 private:
  std::map<std::string, Table, std::less<>> tables_;
  std::map<std::string, Document, std::less<>> documents_;
  std::map<std::string, std::set<std::string>, std::less<>> doc_to_tables_;
};

struct IngestStats {
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t dropped = 0;  // documents without a meaningful sentence
};

// Each line: {"id", "doc_id", "header": [...], "rows": [[...]]}.
// Throws IoError when the file cannot be opened.
IngestStats ingest_tables(const std::filesystem::path& path, CorpusStore& store,
                          Diagnostics* diag);
// Each line: {"id", "url", "text"}.
IngestStats ingest_documents(const std::filesystem::path& path, CorpusStore& store,
                             Diagnostics* diag);

// Sentences of the document containing the table. A missing table or
// document yields an empty result and a diagnostic.
std::vector<Sentence> candidate_sentences(std::string_view table_id, const CorpusStore& store,
                                          Diagnostics* diag);

// Store file: one JSON record per line, tagged "kind": "document" or "table".
void save_store(const CorpusStore& store, const std::filesystem::path& path);
CorpusStore load_store(const std::filesystem::path& path);

}  // namespace tqforge

#endif  // TQFORGE_CORPUS_H_
