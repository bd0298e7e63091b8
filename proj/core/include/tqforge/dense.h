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
#ifndef TQFORGE_DENSE_H_
#define TQFORGE_DENSE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/alignment.h"
#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/table.h"

namespace tqforge {

using Vector = std::vector<double>;

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Produces one vector per token. Implementations must be deterministic and
// keep a fixed dimensionality.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // text_id names the text for providers backed by precomputed vectors:
  // "<table_id>/r<row>/c<col>" for cells, "<doc_id>/s<index>" for sentences.
  virtual std::vector<Vector> embed(std::string_view text_id,
                                    std::span<const Token> tokens) const = 0;
};

// Signed feature hashing of lowercased character trigrams (with boundary
// markers) of each token. Identical tokens map to identical vectors.
class HashedNgramProvider final : public EmbeddingProvider {
 public:
  explicit HashedNgramProvider(std::size_t dim = 256, std::size_t n = 3);
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed(std::string_view text_id, std::span<const Token> tokens) const override;
  Vector embed_token(std::string_view surface) const;

 private:
  std::size_t dim_;
  std::size_t n_;
};

// Precomputed vectors, one JSON line per text:
//   {"text_id": string, "token_vectors": [[real; d]]}
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::filesystem::path& path);
  std::size_t dim() const override { return dim_; }
  // Throws ConfigError for unknown ids or a token-count mismatch.
  std::vector<Vector> embed(std::string_view text_id, std::span<const Token> tokens) const override;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<Vector>, std::less<>> vectors_;
};

std::string cell_text_id(const Table& table, std::size_t row, std::size_t col);
std::string sentence_text_id(const Sentence& sentence);

// Mean of the vectors, scaled to unit length. Returns nullopt when the
// mean is (numerically) zero.
std::optional<Vector> pool_span(std::span<const Vector> token_vectors);

// A[i, l] = cells[i] . phrases[l]. Throws ConfigError on mismatched dimensions.
Matrix similarity_matrix(std::span<const Vector> cells, std::span<const Vector> phrases);

// dim = 1: keep the largest entry of each row; dim = 0: keep the largest
// entry of each column. Everything else becomes zero; ties keep the
// earliest index.
Matrix max_sparsify(const Matrix& a, int dim);

struct RelevanceResult {
  double relevance = 0.0;
  // Column sums of the doubly sparsified matrix, one per phrase.
  std::vector<double> phrase_scores;
  Matrix sparsified;
};

// Sum of max_sparsify(max_sparsify(A, 1), 0).
RelevanceResult relevance(const Matrix& a);

struct PhraseSpan {
  std::size_t token_begin = 0;
  std::size_t token_end = 0;  // exclusive
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool operator==(const PhraseSpan&) const = default;
};

class PhraseDetector {
 public:
  virtual ~PhraseDetector() = default;
  // Non-overlapping spans in sentence order.
  virtual std::vector<PhraseSpan> detect(const Sentence& sentence) const = 0;
};

// Maximal runs of capitalized words, and numbers with an optional leading
// currency sign and trailing magnitude word ("14.8 million"). Any
// capitalized sentence-initial word is picked up as well.
class HeuristicPhraseDetector final : public PhraseDetector {
 public:
  std::vector<PhraseSpan> detect(const Sentence& sentence) const override;
};

inline constexpr double kDefaultTau = 0.6;

struct DenseSelection {
  std::optional<AlignedPair> pair;
  // Relevance of every candidate, in candidate order.
  std::vector<double> sentence_scores;
};

// Picks the candidate with the highest relevance (earliest on ties); its
// phrases scoring above tau become mentions of the one cell that survives
// in their column.
DenseSelection select_sentence_dense(const Table& table, std::span<const Sentence> candidates,
                                     const EmbeddingProvider& provider,
                                     const PhraseDetector& detector, double tau = kDefaultTau,
                                     Diagnostics* diag = nullptr);

}  // namespace tqforge

#endif  // TQFORGE_DENSE_H_
