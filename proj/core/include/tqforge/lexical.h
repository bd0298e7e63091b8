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
#ifndef TQFORGE_LEXICAL_H_
#define TQFORGE_LEXICAL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tqforge/alignment.h"
#include "tqforge/corpus.h"
#include "tqforge/table.h"

namespace tqforge {

using StopwordSet = std::unordered_set<std::string>;

// Built-in English list (core/data/stopwords_en.txt).
const StopwordSet& default_stopwords();
StopwordSet parse_stopwords(std::string_view data);

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - start; }
  bool operator==(const ByteSpan&) const = default;
};

// Longest case-insensitive common substring of cell and sentence, as a span
// of the sentence. Ties go to the earliest sentence position.
std::optional<ByteSpan> lcs(std::string_view cell, std::string_view sentence);

// Minimum coverage of the trimmed cell, in code points. Partial matches must
// exceed it strictly; a match of the whole cell always passes.
inline constexpr double kMinCellCoverage = 0.7;

struct MentionFilterResult {
  bool not_stopword = false;
  bool has_alnum = false;
  bool complete_word = false;
  bool long_enough = false;
  double coverage = 0.0;

  bool passed() const { return not_stopword && has_alnum && complete_word && long_enough; }
};

// Applies the four mention filters to a sentence span matched against cell.
MentionFilterResult check_mention(std::string_view cell, const Sentence& sentence, ByteSpan span,
                                  const StopwordSet& stopwords);

// LCS for every cell (header included), filtered, with overlaps resolved by
// higher coverage, then longer span, then earlier position. Sorted by start.
std::vector<Mention> detect_mentions_string(const Table& table, const Sentence& sentence,
                                            const StopwordSet& stopwords = default_stopwords());

// Sentence with the most mentions; earliest wins ties; none when every
// candidate has zero mentions.
std::optional<AlignedPair> select_sentence_string(
    const Table& table, std::span<const Sentence> candidates,
    const StopwordSet& stopwords = default_stopwords());

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct ScoredCandidate {
  std::size_t index = 0;
  double score = 0.0;
};

// Okapi BM25 of query against each document:
//   sum_{q in query} idf(q) * f(q,D) * (k1 + 1) / (f(q,D) + k1 * (1 - b + b * |D| / avgdl))
//   idf(q) = ln(1 + (N - n(q) + 0.5) / (n(q) + 0.5))
// Repeated query terms contribute once per occurrence. Scores are returned
// in document order.
std::vector<double> bm25_scores(std::span<const std::string> query,
                                std::span<const std::vector<std::string>> documents,
                                const Bm25Params& params);

// Candidates ranked by BM25 with the linearized table as the query; ties
// keep document order.
std::vector<ScoredCandidate> bm25_rank(const Table& table, std::span<const Sentence> candidates,
                                       const Bm25Params& params = {});

// Top BM25 sentence with mentions from string matching. The pair is emitted
// even when it has no mentions; AlignedPair::mentionless() reports that.
std::optional<AlignedPair> select_sentence_bm25(const Table& table,
                                                std::span<const Sentence> candidates,
                                                const Bm25Params& params = {},
                                                const StopwordSet& stopwords = default_stopwords());

// Lead-sentence baseline: the first candidate with at least
// kMinMeaningfulWords words, mentions from string matching, emitted even
// when mentionless.
std::optional<AlignedPair> select_sentence_title(const Table& table,
                                                 std::span<const Sentence> candidates,
                                                 const StopwordSet& stopwords = default_stopwords());

}  // namespace tqforge

#endif  // TQFORGE_LEXICAL_H_
