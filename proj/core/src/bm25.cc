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
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "tqforge/lexical.h"

namespace tqforge {

std::vector<double> bm25_scores(std::span<const std::string> query,
                                std::span<const std::vector<std::string>> documents,
                                const Bm25Params& params) {
  const double n_docs = static_cast<double>(documents.size());
  std::vector<std::unordered_map<std::string_view, std::size_t>> tf(documents.size());
  std::unordered_map<std::string_view, std::size_t> df;
  double total_len = 0.0;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const std::string& term : documents[d]) ++tf[d][term];
    for (const auto& [term, count] : tf[d]) ++df[term];
    total_len += static_cast<double>(documents[d].size());
  }
  const double avgdl = documents.empty() ? 0.0 : total_len / n_docs;

  std::vector<double> scores(documents.size(), 0.0);
  for (const std::string& q : query) {
    auto it = df.find(q);
    if (it == df.end()) continue;
    const double n_q = static_cast<double>(it->second);
    const double idf = std::log(1.0 + (n_docs - n_q + 0.5) / (n_q + 0.5));
    for (std::size_t d = 0; d < documents.size(); ++d) {
      auto f_it = tf[d].find(q);
      if (f_it == tf[d].end()) continue;
      const double f = static_cast<double>(f_it->second);
      const double len_ratio = avgdl > 0.0 ? static_cast<double>(documents[d].size()) / avgdl : 1.0;
      scores[d] += idf * f * (params.k1 + 1.0) /
                   (f + params.k1 * (1.0 - params.b + params.b * len_ratio));
    }
  }
  return scores;
}

std::vector<ScoredCandidate> bm25_rank(const Table& table, std::span<const Sentence> candidates,
                                       const Bm25Params& params) {
  const std::vector<std::string> query = word_terms(linearize_table(table));
  std::vector<std::vector<std::string>> docs;
  docs.reserve(candidates.size());
  for (const Sentence& s : candidates) docs.push_back(word_terms(s.text));
  const std::vector<double> scores = bm25_scores(query, docs, params);

  std::vector<ScoredCandidate> ranked;
  ranked.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) ranked.push_back({i, scores[i]});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) { return a.score > b.score; });
  return ranked;
}

}  // namespace tqforge
