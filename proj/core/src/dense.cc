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
#include "tqforge/dense.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "tqforge/jsonl.h"

namespace tqforge {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw ConfigError("matrix value count does not match shape");
}

HashedNgramProvider::HashedNgramProvider(std::size_t dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim_ == 0 || n_ == 0) throw ConfigError("hashed provider needs positive dim and n");
}

Vector HashedNgramProvider::embed_token(std::string_view surface) const {
  Vector v(dim_, 0.0);
  const std::string padded = "<" + ascii_lower(surface) + ">";
  const std::size_t n = std::min(n_, padded.size());
  for (std::size_t i = 0; i + n <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, n));
    v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  }
  return v;
}

std::vector<Vector> HashedNgramProvider::embed(std::string_view,
                                               std::span<const Token> tokens) const {
  std::vector<Vector> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(embed_token(t.surface));
  return out;
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::filesystem::path& path) {
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const std::string id = require_string(record, "text_id");
    const Json& rows = require(record, "token_vectors");
    if (!rows.is_array()) throw SchemaError(where + ": token_vectors must be an array");
    std::vector<Vector> vectors;
    for (const Json& row : rows) {
      Vector v;
      for (const Json& x : row) {
        if (!x.is_number()) throw SchemaError(where + ": token vectors must hold numbers");
        v.push_back(x.get<double>());
      }
      if (dim_ == 0) dim_ = v.size();
      if (v.size() != dim_ || dim_ == 0) {
        throw ConfigError(where + ": vector dimension " + std::to_string(v.size()) +
                          " differs from " + std::to_string(dim_));
      }
      vectors.push_back(std::move(v));
    }
    if (!vectors_.emplace(id, std::move(vectors)).second) {
      throw SchemaError(where + ": duplicate text_id '" + id + "'");
    }
  });
}

std::vector<Vector> FileEmbeddingProvider::embed(std::string_view text_id,
                                                 std::span<const Token> tokens) const {
  auto it = vectors_.find(text_id);
  if (it == vectors_.end()) {
    throw ConfigError("no embeddings for text '" + std::string(text_id) + "'");
  }
  if (it->second.size() != tokens.size()) {
    throw ConfigError("embeddings for '" + std::string(text_id) + "' have " +
                      std::to_string(it->second.size()) + " tokens, expected " +
                      std::to_string(tokens.size()));
  }
  return it->second;
}

std::string cell_text_id(const Table& table, std::size_t row, std::size_t col) {
  return table.id + "/r" + std::to_string(row) + "/c" + std::to_string(col);
}

std::string sentence_text_id(const Sentence& sentence) {
  return sentence.doc_id + "/s" + std::to_string(sentence.index);
}

std::optional<Vector> pool_span(std::span<const Vector> token_vectors) {
  if (token_vectors.empty()) return std::nullopt;
  const std::size_t d = token_vectors.front().size();
  Vector mean(d, 0.0);
  for (const Vector& v : token_vectors) {
    if (v.size() != d) throw ConfigError("token vectors of different dimensions");
    for (std::size_t k = 0; k < d; ++k) mean[k] += v[k];
  }
  double norm = 0.0;
  for (double& x : mean) {
    x /= static_cast<double>(token_vectors.size());
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (!(norm > 1e-12)) return std::nullopt;
  for (double& x : mean) x /= norm;
  return mean;
}

Matrix similarity_matrix(std::span<const Vector> cells, std::span<const Vector> phrases) {
  Matrix a(cells.size(), phrases.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t l = 0; l < phrases.size(); ++l) {
      if (cells[i].size() != phrases[l].size()) {
        throw ConfigError("cell and phrase vectors differ in dimension (" +
                          std::to_string(cells[i].size()) + " vs " +
                          std::to_string(phrases[l].size()) + ")");
      }
      double dot = 0.0;
      for (std::size_t k = 0; k < cells[i].size(); ++k) dot += cells[i][k] * phrases[l][k];
      a(i, l) = dot;
    }
  }
  return a;
}

Matrix max_sparsify(const Matrix& a, int dim) {
  if (dim != 0 && dim != 1) throw ConfigError("max_sparsify dim must be 0 or 1");
  Matrix out(a.rows(), a.cols());
  if (dim == 1) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (a.cols() == 0) break;
      std::size_t best = 0;
      for (std::size_t c = 1; c < a.cols(); ++c) {
        if (a(r, c) > a(r, best)) best = c;
      }
      out(r, best) = a(r, best);
    }
  } else {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (a.rows() == 0) break;
      std::size_t best = 0;
      for (std::size_t r = 1; r < a.rows(); ++r) {
        if (a(r, c) > a(best, c)) best = r;
      }
      out(best, c) = a(best, c);
    }
  }
  return out;
}

RelevanceResult relevance(const Matrix& a) {
  RelevanceResult result;
  result.sparsified = max_sparsify(max_sparsify(a, 1), 0);
  result.phrase_scores.assign(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      result.phrase_scores[c] += result.sparsified(r, c);
    }
  }
  for (double s : result.phrase_scores) result.relevance += s;
  return result;
}

namespace {

bool is_currency(std::string_view s) {
  return s == "$" || s == "€" || s == "£" || s == "¥";
}

bool is_magnitude(std::string_view s) {
  static constexpr std::array<std::string_view, 6> kWords = {
      "thousand", "million", "billion", "trillion", "percent", "%"};
  const std::string lower = ascii_lower(s);
  return std::find(kWords.begin(), kWords.end(), lower) != kWords.end();
}

enum class ChunkKind { kNone, kCapitalized, kNumeric, kMagnitude };

struct Chunk {
  std::size_t begin = 0;  // token range after trimming punctuation
  std::size_t end = 0;
  ChunkKind kind = ChunkKind::kNone;
  bool clean_left = true;   // nothing stripped on the left
  bool clean_right = true;  // nothing stripped on the right
};

}  // namespace

std::vector<PhraseSpan> HeuristicPhraseDetector::detect(const Sentence& sentence) const {
  const auto& toks = sentence.tokens;
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < toks.size();) {
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].start == toks[j - 1].end) ++j;
    Chunk c;
    c.begin = i;
    c.end = j;
    while (c.begin < c.end && !toks[c.begin].is_word && !is_currency(toks[c.begin].surface)) {
      ++c.begin;
      c.clean_left = false;
    }
    while (c.end > c.begin && !toks[c.end - 1].is_word && toks[c.end - 1].surface != "%") {
      --c.end;
      c.clean_right = false;
    }
    if (c.begin < c.end) {
      std::size_t first_word = c.begin;
      if (is_currency(toks[first_word].surface)) ++first_word;
      if (first_word < c.end && toks[first_word].is_word) {
        const unsigned char lead = static_cast<unsigned char>(toks[first_word].surface[0]);
        if (std::isdigit(lead)) {
          c.kind = ChunkKind::kNumeric;
        } else if (first_word == c.begin && c.end - c.begin == 1 && is_magnitude(toks[c.begin].surface)) {
          c.kind = ChunkKind::kMagnitude;
        } else if (first_word == c.begin && std::isupper(lead)) {
          c.kind = ChunkKind::kCapitalized;
        }
      }
    }
    chunks.push_back(c);
    i = j;
  }

  std::vector<PhraseSpan> spans;
  auto emit = [&](std::size_t b, std::size_t e) {
    spans.push_back({b, e, toks[b].start, toks[e - 1].end});
  };
  for (std::size_t k = 0; k < chunks.size();) {
    const Chunk& c = chunks[k];
    if (c.kind == ChunkKind::kCapitalized) {
      std::size_t end = c.end;
      std::size_t m = k + 1;
      bool open = c.clean_right;
      while (open && m < chunks.size() && chunks[m].kind == ChunkKind::kCapitalized &&
             chunks[m].clean_left) {
        end = chunks[m].end;
        open = chunks[m].clean_right;
        ++m;
      }
      emit(c.begin, end);
      k = m;
    } else if (c.kind == ChunkKind::kNumeric) {
      std::size_t end = c.end;
      std::size_t m = k + 1;
      if (c.clean_right && m < chunks.size() && chunks[m].kind == ChunkKind::kMagnitude &&
          chunks[m].clean_left) {
        end = chunks[m].end;
        ++m;
      }
      emit(c.begin, end);
      k = m;
    } else {
      ++k;
    }
  }
  return spans;
}

DenseSelection select_sentence_dense(const Table& table, std::span<const Sentence> candidates,
                                     const EmbeddingProvider& provider,
                                     const PhraseDetector& detector, double tau,
                                     Diagnostics* diag) {
  DenseSelection selection;
  if (candidates.empty()) return selection;

  struct CellRef {
    std::size_t row, col;
  };
  std::vector<Vector> cell_vectors;
  std::vector<CellRef> cell_refs;
  for (std::size_t row = 0; row < table.num_total_rows(); ++row) {
    for (std::size_t col = 0; col < table.num_columns(); ++col) {
      const auto tokens = tokenize(table.cell(row, col));
      if (tokens.empty()) continue;
      auto pooled = pool_span(provider.embed(cell_text_id(table, row, col), tokens));
      if (!pooled) {
        if (diag) diag->count("dense.degenerate_cell");
        continue;
      }
      cell_vectors.push_back(std::move(*pooled));
      cell_refs.push_back({row, col});
    }
  }

  std::optional<std::size_t> best;
  RelevanceResult best_result;
  std::vector<PhraseSpan> best_phrases;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    const Sentence& sentence = candidates[s];
    std::vector<PhraseSpan> phrases;
    std::vector<Vector> phrase_vectors;
    const auto detected = detector.detect(sentence);
    if (!detected.empty()) {
      const auto token_vectors = provider.embed(sentence_text_id(sentence), sentence.tokens);
      for (const PhraseSpan& p : detected) {
        auto pooled = pool_span(std::span<const Vector>(token_vectors).subspan(
            p.token_begin, p.token_end - p.token_begin));
        if (!pooled) {
          if (diag) diag->count("dense.degenerate_phrase");
          continue;
        }
        phrases.push_back(p);
        phrase_vectors.push_back(std::move(*pooled));
      }
    }
    RelevanceResult result;
    if (!phrases.empty() && !cell_vectors.empty()) {
      result = relevance(similarity_matrix(cell_vectors, phrase_vectors));
    } else {
      result.phrase_scores.assign(phrases.size(), 0.0);
    }
    selection.sentence_scores.push_back(result.relevance);
    if (!best || result.relevance > best_result.relevance) {
      best = s;
      best_result = std::move(result);
      best_phrases = std::move(phrases);
    }
  }

  AlignedPair pair;
  pair.table_id = table.id;
  pair.sentence = candidates[*best];
  pair.method = RetrievalMethod::kDense;
  pair.relevance = best_result.relevance;
  pair.phrase_scores = best_result.phrase_scores;
  for (std::size_t l = 0; l < best_phrases.size(); ++l) {
    if (!(best_result.phrase_scores[l] > tau)) continue;
    std::optional<std::size_t> cell;
    for (std::size_t r = 0; r < best_result.sparsified.rows(); ++r) {
      if (best_result.sparsified(r, l) != 0.0) {
        cell = r;
        break;
      }
    }
    if (!cell) continue;
    const PhraseSpan& p = best_phrases[l];
    pair.mentions.push_back({p.char_start, p.char_end, cell_refs[*cell].row, cell_refs[*cell].col,
                             pair.sentence.text.substr(p.char_start, p.char_end - p.char_start),
                             best_result.phrase_scores[l]});
  }
  selection.pair = std::move(pair);
  return selection;
}

}  // namespace tqforge
