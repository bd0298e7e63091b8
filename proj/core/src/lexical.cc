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
#include "tqforge/lexical.h"

#include <algorithm>

namespace tqforge {

namespace detail {
extern const std::string_view kStopwordsData;
}  // namespace detail

StopwordSet parse_stopwords(std::string_view data) {
  StopwordSet out;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    const std::string_view line = trim(data.substr(pos, nl - pos));
    if (!line.empty() && line.front() != '#') out.insert(ascii_lower(line));
    pos = nl + 1;
  }
  return out;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = parse_stopwords(detail::kStopwordsData);
  return words;
}

std::optional<ByteSpan> lcs(std::string_view cell, std::string_view sentence) {
  if (cell.empty() || sentence.empty()) return std::nullopt;
  const std::string a = ascii_lower(cell);
  const std::string b = ascii_lower(sentence);
  // run[j + 1]: length of the common suffix of a[..i] and b[..j].
  std::vector<std::size_t> prev(b.size() + 1, 0), run(b.size() + 1, 0);
  std::size_t best_len = 0;
  std::size_t best_end = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      run[j + 1] = a[i] == b[j] ? prev[j] + 1 : 0;
      const std::size_t len = run[j + 1];
      const std::size_t end = j + 1;
      if (len > best_len || (len == best_len && len > 0 && end - len < best_end - best_len)) {
        best_len = len;
        best_end = end;
      }
    }
    std::swap(prev, run);
  }
  if (best_len == 0) return std::nullopt;
  return ByteSpan{best_end - best_len, best_end};
}

MentionFilterResult check_mention(std::string_view cell, const Sentence& sentence, ByteSpan span,
                                  const StopwordSet& stopwords) {
  MentionFilterResult r;
  const std::string_view text = std::string_view(sentence.text).substr(span.start, span.size());
  const std::string_view cell_trimmed = trim(cell);
  r.not_stopword = !stopwords.count(ascii_lower(trim(text)));
  r.has_alnum = has_alnum(text);
  bool starts = false;
  bool ends = false;
  for (const Token& t : sentence.tokens) {
    starts = starts || t.start == span.start;
    ends = ends || t.end == span.end;
  }
  r.complete_word = starts && ends;
  const std::size_t cell_len = utf8_length(cell_trimmed);
  const std::size_t span_len = utf8_length(text);
  if (cell_len > 0) {
    r.coverage = static_cast<double>(span_len) / static_cast<double>(cell_len);
    const bool whole_cell = ascii_lower(text) == ascii_lower(cell_trimmed);
    r.long_enough = whole_cell || 10 * span_len > 7 * cell_len;
  }
  return r;
}

std::vector<Mention> detect_mentions_string(const Table& table, const Sentence& sentence,
                                            const StopwordSet& stopwords) {
  std::vector<Mention> found;
  for (std::size_t row = 0; row < table.num_total_rows(); ++row) {
    for (std::size_t col = 0; col < table.num_columns(); ++col) {
      const std::string_view cell = trim(table.cell(row, col));
      if (cell.empty()) continue;
      const auto match = lcs(cell, sentence.text);
      if (!match) continue;
      // Whitespace at either end of a common substring is not part of a word.
      const std::string_view raw =
          std::string_view(sentence.text).substr(match->start, match->size());
      const std::string_view inner = trim(raw);
      if (inner.empty()) continue;
      const std::size_t start = match->start + static_cast<std::size_t>(inner.data() - raw.data());
      const ByteSpan span{start, start + inner.size()};
      const MentionFilterResult check = check_mention(cell, sentence, span, stopwords);
      if (!check.passed()) continue;
      found.push_back({span.start, span.end, row, col, std::string(inner), check.coverage});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Mention& a, const Mention& b) {
    if (a.score != b.score) return a.score > b.score;
    const std::size_t la = a.char_end - a.char_start;
    const std::size_t lb = b.char_end - b.char_start;
    if (la != lb) return la > lb;
    return a.char_start < b.char_start;
  });
  std::vector<Mention> kept;
  for (Mention& m : found) {
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](const Mention& k) { return k.overlaps(m); });
    if (!clash) kept.push_back(std::move(m));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Mention& a, const Mention& b) { return a.char_start < b.char_start; });
  return kept;
}

std::optional<AlignedPair> select_sentence_string(const Table& table,
                                                  std::span<const Sentence> candidates,
                                                  const StopwordSet& stopwords) {
  std::optional<AlignedPair> best;
  for (const Sentence& s : candidates) {
    auto mentions = detect_mentions_string(table, s, stopwords);
    if (mentions.empty()) continue;
    if (best && mentions.size() <= best->mentions.size()) continue;
    AlignedPair pair;
    pair.table_id = table.id;
    pair.sentence = s;
    pair.relevance = static_cast<double>(mentions.size());
    pair.mentions = std::move(mentions);
    pair.method = RetrievalMethod::kString;
    best = std::move(pair);
  }
  return best;
}

std::optional<AlignedPair> select_sentence_bm25(const Table& table,
                                                std::span<const Sentence> candidates,
                                                const Bm25Params& params,
                                                const StopwordSet& stopwords) {
  if (candidates.empty()) return std::nullopt;
  const auto ranked = bm25_rank(table, candidates, params);
  const ScoredCandidate& top = ranked.front();
  AlignedPair pair;
  pair.table_id = table.id;
  pair.sentence = candidates[top.index];
  pair.relevance = top.score;
  pair.mentions = detect_mentions_string(table, pair.sentence, stopwords);
  pair.method = RetrievalMethod::kBm25;
  return pair;
}

std::optional<AlignedPair> select_sentence_title(const Table& table,
                                                 std::span<const Sentence> candidates,
                                                 const StopwordSet& stopwords) {
  if (candidates.empty()) return std::nullopt;
  auto lead = std::find_if(candidates.begin(), candidates.end(), [](const Sentence& s) {
    return s.num_words() >= kMinMeaningfulWords;
  });
  if (lead == candidates.end()) lead = candidates.begin();
  AlignedPair pair;
  pair.table_id = table.id;
  pair.sentence = *lead;
  pair.mentions = detect_mentions_string(table, pair.sentence, stopwords);
  pair.relevance = static_cast<double>(pair.mentions.size());
  pair.method = RetrievalMethod::kTitleHeuristic;
  return pair;
}

}  // namespace tqforge
