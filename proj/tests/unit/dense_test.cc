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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "support/generators.h"
#include "support/oracles.h"
#include "support/tempdir.h"
#include "tqforge/corpus.h"
#include "tqforge/dense.h"
#include "tqforge/error.h"
#include "tqforge/rng.h"

namespace tqforge {
namespace {

Matrix from_grid(const testing::Grid& g) {
  Matrix m(g.size(), g.empty() ? 0 : g[0].size());
  for (std::size_t r = 0; r < g.size(); ++r) {
    for (std::size_t c = 0; c < g[r].size(); ++c) m(r, c) = g[r][c];
  }
  return m;
}

double norm(const Vector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Sentence sentence(std::string text, std::size_t index = 0) {
  const std::size_t n = text.size();
  return make_sentence(text, {0, n}, "doc", index);
}

TEST(PoolSpan, NormalizesSingleVector) {
  const std::vector<Vector> v = {{2.0, 0.0, 0.0}};
  EXPECT_EQ(*pool_span(v), (Vector{1.0, 0.0, 0.0}));
  const std::vector<Vector> w = {{0.0, 2.0}};
  const Vector p = *pool_span(w);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
}

TEST(PoolSpan, MeanOfOrthogonalUnitVectors) {
  const std::vector<Vector> v = {{1.0, 0.0}, {0.0, 1.0}};
  const Vector p = *pool_span(v);
  EXPECT_NEAR(p[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(PoolSpan, OppositeVectorsAreDegenerate) {
  const std::vector<Vector> v = {{1.0, -2.0}, {-1.0, 2.0}};
  EXPECT_FALSE(pool_span(v));
  EXPECT_FALSE(pool_span(std::vector<Vector>{}));
  const std::vector<Vector> bad = {{1.0}, {1.0, 2.0}};
  EXPECT_THROW(pool_span(bad), ConfigError);
}

TEST(SimilarityMatrix, DotProducts) {
  const std::vector<Vector> cells = {{1, 0, 0}, {0, 0.6, 0.8}};
  const std::vector<Vector> phrases = {{1, 0, 0}, {0, 1, 0}, {0, 0.8, -0.6}};
  const Matrix a = similarity_matrix(cells, phrases);
  ASSERT_EQ(a.rows(), 2u);
  ASSERT_EQ(a.cols(), 3u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t l = 0; l < 3; ++l) {
      double dot = 0;
      for (std::size_t k = 0; k < 3; ++k) dot += cells[i][k] * phrases[l][k];
      EXPECT_DOUBLE_EQ(a(i, l), dot);
    }
  }
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 0.0);
  const std::vector<Vector> wrong = {{1, 0}};
  EXPECT_THROW(similarity_matrix(cells, wrong), ConfigError);
}

TEST(MaxSparsify, RowsThenColumns) {
  const Matrix a(2, 3, {0.9, 0.2, 0.1, 0.3, 0.8, 0.7});
  const Matrix rows = max_sparsify(a, 1);
  EXPECT_EQ(rows, Matrix(2, 3, {0.9, 0, 0, 0, 0.8, 0}));
  EXPECT_EQ(max_sparsify(rows, 0), rows);
}

TEST(MaxSparsify, WeakerCellLosesSharedPhrase) {
  const Matrix a(2, 2, {0.9, 0.1, 0.8, 0.2});
  const Matrix rows = max_sparsify(a, 1);
  EXPECT_EQ(rows, Matrix(2, 2, {0.9, 0, 0.8, 0}));
  EXPECT_EQ(max_sparsify(rows, 0), Matrix(2, 2, {0.9, 0, 0, 0}));
}

TEST(MaxSparsify, TiesKeepEarliestIndex) {
  const Matrix a(2, 2, {0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(max_sparsify(a, 1), Matrix(2, 2, {0.5, 0, 0.5, 0}));
  EXPECT_EQ(max_sparsify(a, 0), Matrix(2, 2, {0.5, 0.5, 0, 0}));
  EXPECT_EQ(max_sparsify(Matrix(2, 2, 0.0), 1), Matrix(2, 2, 0.0));
  EXPECT_THROW(max_sparsify(a, 2), ConfigError);
}

TEST(Relevance, HandExamples) {
  const RelevanceResult r1 = relevance(Matrix(2, 3, {0.9, 0.2, 0.1, 0.3, 0.8, 0.7}));
  EXPECT_NEAR(r1.relevance, 1.7, 1e-12);
  EXPECT_EQ(r1.phrase_scores, (std::vector<double>{0.9, 0.8, 0.0}));
  EXPECT_DOUBLE_EQ(relevance(Matrix(2, 2, {0.9, 0.1, 0.8, 0.2})).relevance, 0.9);
  for (double x : {-0.4, 0.0, 0.37, 1.0}) EXPECT_EQ(relevance(Matrix(1, 1, {x})).relevance, x);
}

// The two passes agree with a double-loop reference, leave at most one
// nonzero per row and column, and keep original entries only.
TEST(MaxSparsifyProperty, MatchesReferenceAndIsSparse) {
  Rng rng(41);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t rows = 1 + rng.index(50);
    const std::size_t cols = 1 + rng.index(20);
    const testing::Grid g = testing::random_grid(rng, rows, cols);
    const Matrix a = from_grid(g);
    const Matrix once = max_sparsify(a, 1);
    ASSERT_EQ(once, from_grid(testing::sparsify_reference(g, 1)));
    const Matrix twice = max_sparsify(once, 0);
    ASSERT_EQ(twice, from_grid(testing::sparsify_reference(testing::sparsify_reference(g, 1), 0)));
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t nz = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        if (twice(r, c) != 0.0) {
          ++nz;
          EXPECT_EQ(twice(r, c), a(r, c));
        }
      }
      EXPECT_LE(nz, 1u);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t nz = 0;
      for (std::size_t r = 0; r < rows; ++r) nz += twice(r, c) != 0.0;
      EXPECT_LE(nz, 1u);
    }
  }
}

// With non-negative similarities, relevance never exceeds the sum of row
// maxima, with equality exactly when no two row maxima share a column.
TEST(RelevanceProperty, BoundedBySumOfRowMaximaWhenNonNegative) {
  Rng rng(43);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t rows = 1 + rng.index(12);
    const std::size_t cols = 1 + rng.index(8);
    const Matrix a = from_grid(testing::random_grid(rng, rows, cols, 0.0, 1.0));
    double bound = 0;
    std::vector<std::size_t> argmax(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 1; c < cols; ++c) {
        if (a(r, c) > a(r, argmax[r])) argmax[r] = c;
      }
      bound += a(r, argmax[r]);
    }
    bool shared = false;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t s = r + 1; s < rows; ++s) {
        shared |= argmax[r] == argmax[s] && a(r, argmax[r]) > 0 && a(s, argmax[s]) > 0;
      }
    }
    const double rel = relevance(a).relevance;
    EXPECT_LE(rel, bound + 1e-12);
    if (!shared) EXPECT_NEAR(rel, bound, 1e-12);
    if (shared) EXPECT_LT(rel, bound);
  }
}

// A negative row maximum is dropped by the column pass, so the bound does
// not hold for general similarity matrices.
TEST(Relevance, NegativeRowMaximumCanExceedRowMaxSum) {
  const Matrix a(2, 1, {0.5, -0.3});
  EXPECT_DOUBLE_EQ(relevance(a).relevance, 0.5);
  EXPECT_GT(relevance(a).relevance, 0.5 + -0.3);
}

TEST(HashedNgramProvider, DeterministicNonzeroVectors) {
  const HashedNgramProvider p;
  const auto toks = tokenize("Spider-Man Spider-Man grossed");
  const auto a = p.embed("x", toks);
  const auto b = p.embed("y", toks);
  ASSERT_EQ(a.size(), toks.size());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0], a[3]);  // identical tokens
  for (const Vector& v : a) {
    EXPECT_EQ(v.size(), p.dim());
    EXPECT_GT(norm(v), 0.0);
  }
}

TEST(PoolSpanProperty, UnitNormAndBoundedSimilarities) {
  Rng rng(47);
  const HashedNgramProvider p(64);
  for (int iter = 0; iter < 200; ++iter) {
    const std::string a = testing::random_phrase(rng, 1, 5);
    const std::string b = testing::random_phrase(rng, 1, 5);
    const auto va = pool_span(p.embed("a", tokenize(a)));
    const auto vb = pool_span(p.embed("b", tokenize(b)));
    if (!va || !vb) continue;
    EXPECT_NEAR(norm(*va), 1.0, 1e-9);
    const std::vector<Vector> cells = {*va};
    const std::vector<Vector> phrases = {*vb};
    const double s = similarity_matrix(cells, phrases)(0, 0);
    EXPECT_GE(s, -1.0 - 1e-9);
    EXPECT_LE(s, 1.0 + 1e-9);
  }
}

TEST(FileEmbeddingProvider, LoadsVectorsById) {
  testing::TempDir dir;
  const auto path = dir.write("emb.jsonl",
                              R"({"text_id":"t/r0/c0","token_vectors":[[1,0],[0,1]]}
{"text_id":"d/s0","token_vectors":[[0.5,0.5]]}
)");
  const FileEmbeddingProvider p(path);
  EXPECT_EQ(p.dim(), 2u);
  const auto toks = tokenize("a b");
  EXPECT_EQ(p.embed("t/r0/c0", toks).size(), 2u);
  EXPECT_THROW(p.embed("nope", toks), ConfigError);
  EXPECT_THROW(p.embed("d/s0", toks), ConfigError);
  const auto bad = dir.write("bad.jsonl", R"({"text_id":"a","token_vectors":[[1,0]]}
{"text_id":"b","token_vectors":[[1,0,0]]}
)");
  EXPECT_THROW(FileEmbeddingProvider{bad}, ConfigError);
}

TEST(HeuristicPhraseDetector, EntitiesAndAmounts) {
  const Sentence s = sentence("Spider-Man grossed $114.8 million in 2002");
  std::vector<std::string> got;
  for (const PhraseSpan& p : HeuristicPhraseDetector().detect(s)) {
    got.push_back(s.text.substr(p.char_start, p.char_end - p.char_start));
  }
  EXPECT_EQ(got, (std::vector<std::string>{"Spider-Man", "$114.8 million", "2002"}));
}

TEST(HeuristicPhraseDetector, LowercaseWithoutDigitsIsEmpty) {
  EXPECT_TRUE(HeuristicPhraseDetector().detect(sentence("nothing to see here, really.")).empty());
}

TEST(HeuristicPhraseDetector, SentenceInitialCapitalOverTriggers) {
  const Sentence s = sentence("Yesterday it rained.");
  const auto spans = HeuristicPhraseDetector().detect(s);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(s.text.substr(spans[0].char_start, spans[0].char_end - spans[0].char_start), "Yesterday");
}

TEST(HeuristicPhraseDetectorProperty, SpansDisjointAndOrdered) {
  Rng rng(53);
  for (int iter = 0; iter < 300; ++iter) {
    const Sentence s = sentence(testing::random_phrase(rng, 1, 12));
    std::size_t prev = 0;
    for (const PhraseSpan& p : HeuristicPhraseDetector().detect(s)) {
      EXPECT_LE(prev, p.char_start);
      EXPECT_LT(p.char_start, p.char_end);
      EXPECT_EQ(s.tokens[p.token_begin].start, p.char_start);
      EXPECT_EQ(s.tokens[p.token_end - 1].end, p.char_end);
      prev = p.char_end;
    }
  }
}

// Fixed vectors per token surface, and every word token is its own phrase:
// lets a test dictate the similarity matrix.
class FixedProvider : public EmbeddingProvider {
 public:
  explicit FixedProvider(std::map<std::string, Vector> table) : table_(std::move(table)) {}
  std::size_t dim() const override { return 5; }
  std::vector<Vector> embed(std::string_view, std::span<const Token> tokens) const override {
    std::vector<Vector> out;
    for (const Token& t : tokens) out.push_back(table_.at(t.surface));
    return out;
  }

 private:
  std::map<std::string, Vector> table_;
};

class WordDetector : public PhraseDetector {
 public:
  std::vector<PhraseSpan> detect(const Sentence& s) const override {
    std::vector<PhraseSpan> out;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (s.tokens[i].is_word) out.push_back({i, i + 1, s.tokens[i].start, s.tokens[i].end});
    }
    return out;
  }
};

FixedProvider threshold_provider() {
  return FixedProvider({{"A", {1, 0, 0, 0, 0}},
                        {"B", {0, 1, 0, 0, 0}},
                        {"C", {0, 0, 1, 0, 0}},
                        {"x", {0, 0, 0, 0, 1}},
                        {"p", {0.9, 0, 0, std::sqrt(1 - 0.81), 0}},
                        {"q", {0, 0.8, 0, 0.6, 0}},
                        {"r", {0, 0, 0.3, std::sqrt(1 - 0.09), 0}}});
}

TEST(SelectSentenceDense, ThresholdPicksPhrasesAboveTau) {
  const Table t{"t", {"A", "B", "C"}, {{"x", "x", "x"}}, "d"};
  const std::vector<Sentence> c = {sentence("p q r")};
  const FixedProvider provider = threshold_provider();
  const DenseSelection sel = select_sentence_dense(t, c, provider, WordDetector(), 0.6);
  ASSERT_TRUE(sel.pair);
  ASSERT_EQ(sel.pair->phrase_scores.size(), 3u);
  EXPECT_NEAR(sel.pair->phrase_scores[0], 0.9, 1e-12);
  EXPECT_NEAR(sel.pair->phrase_scores[1], 0.8, 1e-12);
  EXPECT_NEAR(sel.pair->phrase_scores[2], 0.3, 1e-12);
  ASSERT_EQ(sel.pair->mentions.size(), 2u);
  EXPECT_EQ(sel.pair->mentions[0].surface, "p");
  EXPECT_EQ(sel.pair->mentions[0].cell_row, 0u);
  EXPECT_EQ(sel.pair->mentions[0].cell_col, 0u);
  EXPECT_EQ(sel.pair->mentions[1].surface, "q");
  EXPECT_EQ(sel.pair->mentions[1].cell_col, 1u);
  EXPECT_NEAR(sel.pair->relevance, 2.0, 1e-12);

  const DenseSelection strict = select_sentence_dense(t, c, provider, WordDetector(), 0.95);
  ASSERT_TRUE(strict.pair);
  EXPECT_TRUE(strict.pair->mentionless());
}

TEST(SelectSentenceDense, VerbatimCellOutranksUnrelatedSentence) {
  const Table t{"t", {"Film", "Year"}, {{"Spider-Man", "2002"}}, "d"};
  const std::vector<Sentence> c = {sentence("Quiet Weather held over Norway.", 0),
                                   sentence("Spider-Man opened to crowds.", 1)};
  const HashedNgramProvider provider;
  const DenseSelection sel = select_sentence_dense(t, c, provider, HeuristicPhraseDetector());
  ASSERT_TRUE(sel.pair);
  EXPECT_EQ(sel.pair->sentence.index, 1u);
  EXPECT_GT(sel.sentence_scores[1], sel.sentence_scores[0]);
  ASSERT_FALSE(sel.pair->mentions.empty());
  EXPECT_EQ(sel.pair->mentions[0].surface, "Spider-Man");
  EXPECT_EQ(sel.pair->mentions[0].cell_row, 1u);
  EXPECT_EQ(sel.pair->method, RetrievalMethod::kDense);
}

TEST(SelectSentenceDense, NoPhrasesMeansZeroRelevance) {
  const Table t{"t", {"Film"}, {{"Spider-Man"}}, "d"};
  const std::vector<Sentence> c = {sentence("nothing capitalized here.", 0)};
  const DenseSelection sel = select_sentence_dense(t, c, HashedNgramProvider(), HeuristicPhraseDetector());
  ASSERT_TRUE(sel.pair);
  EXPECT_EQ(sel.sentence_scores, (std::vector<double>{0.0}));
  EXPECT_TRUE(sel.pair->mentionless());
  EXPECT_FALSE(select_sentence_dense(t, {}, HashedNgramProvider(), HeuristicPhraseDetector()).pair);
}

}  // namespace
}  // namespace tqforge
