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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "support/generators.h"
#include "support/tempdir.h"
#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/rng.h"

namespace tqforge {
namespace {

using testing::TempDir;

std::vector<std::string> sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const SentenceSpan& s : split_sentences(text)) out.emplace_back(text.substr(s.start, s.end - s.start));
  return out;
}

TEST(SplitSentences, SimpleCases) {
  EXPECT_EQ(sentence_texts("A b. C d."), (std::vector<std::string>{"A b.", "C d."}));
  EXPECT_EQ(sentence_texts("Mr. Smith won."), (std::vector<std::string>{"Mr. Smith won."}));
  EXPECT_EQ(sentence_texts("no terminal punctuation"),
            (std::vector<std::string>{"no terminal punctuation"}));
  EXPECT_TRUE(sentence_texts("   ").empty());
}

TEST(SplitSentences, MatchesHandSegmentedFixture) {
  const auto cases = read_jsonl(std::string(TQFORGE_TEST_DATA_DIR) + "/segmentation.jsonl");
  ASSERT_GE(cases.size(), 10u);
  for (const Json& c : cases) {
    const std::string text = c.at("text");
    EXPECT_EQ(sentence_texts(text), c.at("sentences").get<std::vector<std::string>>()) << text;
  }
}

// Spans are ordered and disjoint, and whatever lies between them is
// whitespace only.
TEST(SplitSentencesProperty, SpansTileTextMinusSeparators) {
  Rng rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    std::string text;
    const std::size_t n = 1 + rng.index(5);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) text += rng.bernoulli(0.5) ? " " : "  ";
      std::string p = testing::random_phrase(rng, 1, 8);
      if (rng.bernoulli(0.7)) p += rng.bernoulli(0.8) ? "." : "?";
      text += p;
    }
    std::size_t prev = 0;
    for (const SentenceSpan& s : split_sentences(text)) {
      ASSERT_LE(prev, s.start);
      ASSERT_LT(s.start, s.end);
      ASSERT_LE(s.end, text.size());
      EXPECT_TRUE(trim(text.substr(prev, s.start - prev)).empty()) << text;
      prev = s.end;
    }
    EXPECT_TRUE(trim(text.substr(prev)).empty()) << text;
  }
}

TEST(MakeDocument, SentencesCarryProvenanceAndOffsets) {
  const Document d = make_document("d1", "http://x", "First one here. Second one there!");
  ASSERT_EQ(d.sentences.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const Sentence& s = d.sentences[i];
    EXPECT_EQ(s.doc_id, "d1");
    EXPECT_EQ(s.index, i);
    EXPECT_EQ(d.text.substr(s.doc_start, s.text.size()), s.text);
  }
  EXPECT_EQ(d.sentences[1].num_words(), 3u);
}

class IngestTest : public ::testing::Test {
 protected:
  TempDir dir_;
};

TEST_F(IngestTest, SkipsRaggedTable) {
  const auto path = dir_.write("tables.jsonl",
                               R"({"id":"a","doc_id":"d","header":["X"],"rows":[["1"]]}
{"id":"b","doc_id":"d","header":["X","Y"],"rows":[["1","2"]]}
{"id":"c","doc_id":"d","header":["X"],"rows":[["1"],["2"]]}
{"id":"r","doc_id":"d","header":["X","Y"],"rows":[["1"]]}
)");
  CorpusStore store;
  Diagnostics diag;
  const IngestStats stats = ingest_tables(path, store, &diag);
  EXPECT_EQ(stats.accepted, 3u);
  EXPECT_EQ(stats.malformed, 1u);
  EXPECT_EQ(store.tables().size(), 3u);
  EXPECT_EQ(diag.counter("tables.malformed"), 1u);
}

TEST_F(IngestTest, EmptyFileWarns) {
  const auto path = dir_.write("tables.jsonl", "");
  CorpusStore store;
  Diagnostics diag;
  ingest_tables(path, store, &diag);
  EXPECT_TRUE(store.tables().empty());
  EXPECT_FALSE(diag.messages().empty());
}

TEST_F(IngestTest, DuplicateIdKeepsFirst) {
  const auto path = dir_.write("tables.jsonl",
                               R"({"id":"a","doc_id":"d","header":["X"],"rows":[["first"]]}
{"id":"a","doc_id":"d","header":["X"],"rows":[["second"]]}
)");
  CorpusStore store;
  Diagnostics diag;
  const IngestStats stats = ingest_tables(path, store, &diag);
  EXPECT_EQ(stats.duplicates, 1u);
  EXPECT_EQ(store.find_table("a")->rows[0][0], "first");
  EXPECT_EQ(diag.counter("tables.duplicate"), 1u);
}

TEST_F(IngestTest, UnparseableLineIsSkipped) {
  const auto path = dir_.write("tables.jsonl",
                               "{\"id\":\"a\",\"doc_id\":\"d\",\"header\":[\"X\"],\"rows\":[[\"1\"]]}\n{oops\n");
  CorpusStore store;
  Diagnostics diag;
  const IngestStats stats = ingest_tables(path, store, &diag);
  EXPECT_EQ(stats.accepted, 1u);
  EXPECT_EQ(stats.malformed, 1u);
}

TEST_F(IngestTest, MissingFileIsFatal) {
  CorpusStore store;
  EXPECT_THROW(ingest_tables(dir_ / "nope.jsonl", store, nullptr), Error);
  EXPECT_THROW(ingest_documents(dir_ / "nope.jsonl", store, nullptr), Error);
}

TEST_F(IngestTest, DocumentsWithoutMeaningfulSentenceDropped) {
  const auto path = dir_.write("docs.jsonl",
                               R"({"id":"d1","url":"u","text":"The film broke the record. It won."}
{"id":"d2","url":"u","text":"Short. Tiny."}
{"id":"d3","url":"u"}
)");
  CorpusStore store;
  Diagnostics diag;
  const IngestStats stats = ingest_documents(path, store, &diag);
  EXPECT_EQ(stats.accepted, 1u);
  EXPECT_EQ(stats.dropped, 1u);
  EXPECT_EQ(stats.malformed, 1u);
  ASSERT_NE(store.find_document("d1"), nullptr);
  EXPECT_EQ(store.find_document("d1")->sentences.size(), 2u);
}

CorpusStore two_doc_store() {
  CorpusStore store;
  store.add_document(make_document("d1", "u1", "One two three four. Five six seven eight. Nine ten eleven twelve. "
                                               "Thirteen fourteen fifteen sixteen. Seventeen eighteen nineteen twenty."));
  store.add_document(make_document("d2", "u2", "Other document sentence here."));
  store.add_table(Table{"t1", {"A"}, {{"x"}}, "d1"});
  store.add_table(Table{"t2", {"B"}, {{"y"}}, "d1"});
  store.add_table(Table{"t3", {"C"}, {{"z"}}, "d2"});
  store.add_table(Table{"orphan", {"D"}, {{"w"}}, "missing"});
  return store;
}

TEST(CandidateSentences, LinkedDocumentOnly) {
  const CorpusStore store = two_doc_store();
  Diagnostics diag;
  const auto c1 = candidate_sentences("t1", store, &diag);
  ASSERT_EQ(c1.size(), 5u);
  for (std::size_t i = 0; i < c1.size(); ++i) {
    EXPECT_EQ(c1[i].doc_id, "d1");
    EXPECT_EQ(c1[i].index, i);
  }
  const auto c2 = candidate_sentences("t2", store, &diag);
  ASSERT_EQ(c2.size(), c1.size());
  for (std::size_t i = 0; i < c1.size(); ++i) EXPECT_EQ(c1[i].text, c2[i].text);
  EXPECT_TRUE(diag.empty());
}

TEST(CandidateSentences, DanglingLinkGivesEmptyWithDiagnostic) {
  const CorpusStore store = two_doc_store();
  Diagnostics diag;
  EXPECT_TRUE(candidate_sentences("orphan", store, &diag).empty());
  EXPECT_EQ(diag.counter("candidates.dangling"), 1u);
  EXPECT_TRUE(candidate_sentences("nope", store, &diag).empty());
  EXPECT_EQ(diag.counter("candidates.unknown_table"), 1u);
}

TEST(CorpusStore, LinksAndDanglingTables) {
  CorpusStore store = two_doc_store();
  EXPECT_EQ(store.tables_in_document("d1"), (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(store.dangling_tables(), (std::vector<std::string>{"orphan"}));
  Diagnostics diag;
  EXPECT_EQ(store.drop_dangling_tables(&diag), 1u);
  EXPECT_TRUE(store.dangling_tables().empty());
  EXPECT_TRUE(store.tables_in_document("missing").empty());
  EXPECT_FALSE(store.add_table(Table{"t1", {"A"}, {{"x"}}, "d1"}));
}

// No sentence returned for a table comes from a document other than the
// table's own.
TEST(CandidateSentencesProperty, NoCrossDocumentLeakage) {
  Rng rng(17);
  for (int iter = 0; iter < 50; ++iter) {
    CorpusStore store;
    const std::size_t docs = 1 + rng.index(4);
    for (std::size_t d = 0; d < docs; ++d) {
      std::string text;
      for (std::size_t s = 0, n = 1 + rng.index(4); s < n; ++s) {
        text += "Sentence " + std::to_string(s) + " of doc " + std::to_string(d) + ". ";
      }
      store.add_document(make_document("d" + std::to_string(d), "u", text));
    }
    for (std::size_t t = 0; t < 6; ++t) {
      store.add_table(Table{"t" + std::to_string(t), {"A"}, {{"x"}}, "d" + std::to_string(rng.index(docs + 1))});
    }
    for (const auto& [id, table] : store.tables()) {
      const auto sentences = candidate_sentences(id, store, nullptr);
      const Document* doc = store.find_document(table.doc_id);
      EXPECT_EQ(sentences.size(), doc ? doc->sentences.size() : 0u);
      for (const Sentence& s : sentences) EXPECT_EQ(s.doc_id, table.doc_id);
    }
  }
}

TEST_F(IngestTest, StoreRoundTrip) {
  CorpusStore store = two_doc_store();
  save_store(store, dir_ / "dangling.jsonl");
  EXPECT_THROW(load_store(dir_ / "dangling.jsonl"), SchemaError);
  store.drop_dangling_tables(nullptr);
  save_store(store, dir_ / "store.jsonl");
  const CorpusStore back = load_store(dir_ / "store.jsonl");
  ASSERT_EQ(back.tables().size(), store.tables().size());
  for (const auto& [id, t] : store.tables()) EXPECT_EQ(*back.find_table(id), t);
  for (const auto& [id, d] : store.documents()) {
    ASSERT_NE(back.find_document(id), nullptr);
    EXPECT_EQ(back.find_document(id)->text, d.text);
    EXPECT_EQ(back.find_document(id)->sentences.size(), d.sentences.size());
  }
}

}  // namespace
}  // namespace tqforge
