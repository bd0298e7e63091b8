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
#include "tqforge/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "tqforge/jsonl.h"
#include "tqforge/records.h"

namespace tqforge {
namespace {

constexpr std::array<std::string_view, 46> kAbbreviations = {
    "mr",   "mrs",  "ms",   "dr",  "prof", "sr",   "jr",   "st",    "mt",    "ft",
    "vs",   "etc",  "inc",  "ltd", "co",   "corp", "jan",  "feb",   "mar",   "apr",
    "jun",  "jul",  "aug",  "sep", "sept", "oct",  "nov",  "dec",   "no",    "nos",
    "fig",  "gen",  "gov",  "sen", "rep",  "lt",   "col",  "sgt",   "capt",  "rev",
    "hon",  "est",  "u.s",  "u.k", "e.g",  "i.e"};

bool is_closing(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x201D || cp == 0x2019 ||
         cp == 0x00BB;
}

bool is_opening(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018 ||
         cp == 0x00AB;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Word (letters, digits and inner periods) that ends right before pos.
std::string word_before(std::string_view text, std::size_t pos) {
  std::size_t b = pos;
  while (b > 0) {
    const char c = text[b - 1];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      --b;
    } else {
      break;
    }
  }
  std::string_view w = text.substr(b, pos - b);
  while (!w.empty() && w.front() == '.') w.remove_prefix(1);
  return std::string(w);
}

bool is_abbreviation(std::string_view word) {
  if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  const std::string lower = ascii_lower(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

void push_trimmed(std::string_view text, std::size_t b, std::size_t e,
                  std::vector<SentenceSpan>& out) {
  const std::string_view piece = trim(text.substr(b, e - b));
  if (piece.empty()) return;
  const std::size_t start = static_cast<std::size_t>(piece.data() - text.data());
  out.push_back({start, start + piece.size()});
}

}  // namespace

std::size_t Sentence::num_words() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    const std::size_t mark = i;
    std::size_t j = i + 1;
    while (j < text.size() && is_terminal(text[j])) ++j;
    while (j < text.size()) {
      std::size_t len = 1;
      if (!is_closing(decode_utf8(text, j, &len))) break;
      j += len;
    }
    std::size_t k = j;
    while (k < text.size()) {
      std::size_t len = 1;
      if (!is_unicode_space(decode_utf8(text, k, &len))) break;
      k += len;
    }
    i = j;
    if (k == j || k >= text.size()) continue;
    std::size_t first = k;
    while (first < text.size()) {
      std::size_t len = 1;
      if (!is_opening(decode_utf8(text, first, &len))) break;
      first += len;
    }
    if (first >= text.size() || !std::isupper(static_cast<unsigned char>(text[first]))) continue;
    if (text[mark] == '.' && j == mark + 1 && is_abbreviation(word_before(text, mark))) continue;
    push_trimmed(text, start, j, spans);
    start = k;
  }
  push_trimmed(text, start, text.size(), spans);
  return spans;
}

Sentence make_sentence(std::string_view doc_text, SentenceSpan span, std::string doc_id,
                       std::size_t index) {
  Sentence s;
  s.text = std::string(doc_text.substr(span.start, span.end - span.start));
  s.tokens = tokenize(s.text);
  s.doc_id = std::move(doc_id);
  s.index = index;
  s.doc_start = span.start;
  return s;
}

Document make_document(std::string id, std::string url, std::string text) {
  Document doc{std::move(id), std::move(url), std::move(text), {}};
  const auto spans = split_sentences(doc.text);
  doc.sentences.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    doc.sentences.push_back(make_sentence(doc.text, spans[i], doc.id, i));
  }
  return doc;
}

bool has_meaningful_sentence(const Document& doc) {
  return std::any_of(doc.sentences.begin(), doc.sentences.end(),
                     [](const Sentence& s) { return s.num_words() >= kMinMeaningfulWords; });
}

bool CorpusStore::add_table(Table table) {
  if (tables_.count(table.id)) return false;
  doc_to_tables_[table.doc_id].insert(table.id);
  std::string id = table.id;
  tables_.emplace(std::move(id), std::move(table));
  return true;
}

bool CorpusStore::add_document(Document doc) {
  if (documents_.count(doc.id)) return false;
  std::string id = doc.id;
  documents_.emplace(std::move(id), std::move(doc));
  return true;
}

const Table* CorpusStore::find_table(std::string_view id) const {
  auto it = tables_.find(id);
  return it == tables_.end() ? nullptr : &it->second;
}

const Document* CorpusStore::find_document(std::string_view id) const {
  auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

std::vector<std::string> CorpusStore::tables_in_document(std::string_view doc_id) const {
  auto it = doc_to_tables_.find(doc_id);
  if (it == doc_to_tables_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> CorpusStore::dangling_tables() const {
  std::vector<std::string> out;
  for (const auto& [id, table] : tables_) {
    if (!documents_.count(table.doc_id)) out.push_back(id);
  }
  return out;
}

std::size_t CorpusStore::drop_dangling_tables(Diagnostics* diag) {
  const auto dangling = dangling_tables();
  for (const std::string& id : dangling) {
    auto it = tables_.find(id);
    auto link = doc_to_tables_.find(it->second.doc_id);
    if (link != doc_to_tables_.end()) {
      link->second.erase(id);
      if (link->second.empty()) doc_to_tables_.erase(link);
    }
    if (diag) {
      diag->warn("table '" + id + "' links to missing document '" + it->second.doc_id + "'");
      diag->count("tables.dangling");
    }
    tables_.erase(it);
  }
  return dangling.size();
}

IngestStats ingest_tables(const std::filesystem::path& path, CorpusStore& store,
                          Diagnostics* diag) {
  IngestStats stats;
  auto malformed = [&](std::size_t line_no, const std::string& why) {
    ++stats.malformed;
    if (diag) {
      diag->warn(path.string() + ":" + std::to_string(line_no) + ": skipped table: " + why);
      diag->count("tables.malformed");
    }
  };
  for_each_jsonl(
      path,
      [&](std::size_t line_no, const Json& record) {
        Table table;
        try {
          table = table_from_json(record);
        } catch (const Error& e) {
          malformed(line_no, e.what());
          return;
        }
        if (!store.add_table(table)) {
          ++stats.duplicates;
          if (diag) {
            diag->warn(path.string() + ":" + std::to_string(line_no) + ": duplicate table id '" +
                       table.id + "'");
            diag->count("tables.duplicate");
          }
          return;
        }
        ++stats.accepted;
      },
      malformed);
  if (stats.accepted == 0 && diag) diag->warn(path.string() + ": no tables ingested");
  return stats;
}

IngestStats ingest_documents(const std::filesystem::path& path, CorpusStore& store,
                             Diagnostics* diag) {
  IngestStats stats;
  auto malformed = [&](std::size_t line_no, const std::string& why) {
    ++stats.malformed;
    if (diag) {
      diag->warn(path.string() + ":" + std::to_string(line_no) + ": skipped document: " + why);
      diag->count("documents.malformed");
    }
  };
  for_each_jsonl(
      path,
      [&](std::size_t line_no, const Json& record) {
        Document doc;
        try {
          check_keys(record, {"id", "url", "text"});
          doc = make_document(require_string(record, "id"), require_string(record, "url"),
                              require_string(record, "text"));
        } catch (const Error& e) {
          malformed(line_no, e.what());
          return;
        }
        if (!has_meaningful_sentence(doc)) {
          ++stats.dropped;
          if (diag) diag->count("documents.no_meaningful_sentence");
          return;
        }
        const std::string id = doc.id;
        if (!store.add_document(std::move(doc))) {
          ++stats.duplicates;
          if (diag) {
            diag->warn(path.string() + ":" + std::to_string(line_no) + ": duplicate document id '" +
                       id + "'");
            diag->count("documents.duplicate");
          }
          return;
        }
        ++stats.accepted;
      },
      malformed);
  if (stats.accepted == 0 && diag) diag->warn(path.string() + ": no documents ingested");
  return stats;
}

std::vector<Sentence> candidate_sentences(std::string_view table_id, const CorpusStore& store,
                                          Diagnostics* diag) {
  const Table* table = store.find_table(table_id);
  if (!table) {
    if (diag) {
      diag->warn("unknown table '" + std::string(table_id) + "'");
      diag->count("candidates.unknown_table");
    }
    return {};
  }
  const Document* doc = store.find_document(table->doc_id);
  if (!doc) {
    if (diag) {
      diag->warn("table '" + table->id + "' links to missing document '" + table->doc_id + "'");
      diag->count("candidates.dangling");
    }
    return {};
  }
  return doc->sentences;
}

void save_store(const CorpusStore& store, const std::filesystem::path& path) {
  JsonlWriter out(path);
  for (const auto& [id, doc] : store.documents()) {
    out.write(Json{{"kind", "document"}, {"id", doc.id}, {"url", doc.url}, {"text", doc.text}});
  }
  for (const auto& [id, table] : store.tables()) {
    Json j = table_to_json(table);
    j["kind"] = "table";
    out.write(j);
  }
  out.close();
}

CorpusStore load_store(const std::filesystem::path& path) {
  CorpusStore store;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const std::string kind = require_string(record, "kind");
      Json body = record;
      body.erase("kind");
      bool added = false;
      if (kind == "document") {
        check_keys(body, {"id", "url", "text"});
        added = store.add_document(make_document(require_string(body, "id"),
                                                 require_string(body, "url"),
                                                 require_string(body, "text")));
      } else if (kind == "table") {
        added = store.add_table(table_from_json(body));
      } else {
        throw SchemaError("unknown record kind '" + kind + "'");
      }
      if (!added) throw SchemaError("duplicate id");
    } catch (const Error& e) {
      throw SchemaError(where + ": " + e.what());
    }
  });
  if (!store.dangling_tables().empty()) {
    throw SchemaError(path.string() + ": table '" + store.dangling_tables().front() +
                      "' links to a missing document");
  }
  return store;
}

}  // namespace tqforge
