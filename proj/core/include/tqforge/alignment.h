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
#ifndef TQFORGE_ALIGNMENT_H_
#define TQFORGE_ALIGNMENT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/corpus.h"
#include "tqforge/jsonl.h"
#include "tqforge/table.h"

namespace tqforge {

enum class RetrievalMethod { kString, kBm25, kDense, kTitleHeuristic };

std::string_view method_name(RetrievalMethod method);
RetrievalMethod parse_method(std::string_view name);

// A sentence span aligned to one table cell. cell_row 0 is the header.
struct Mention {
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::size_t cell_row = 0;
  std::size_t cell_col = 0;
  std::string surface;
  // Coverage ratio for string matching; phrase assessment score for dense.
  double score = 0.0;

  bool overlaps(const Mention& other) const {
    return char_start < other.char_end && other.char_start < char_end;
  }
  bool operator==(const Mention&) const = default;
};

struct AlignedPair {
  std::string table_id;
  Sentence sentence;
  std::vector<Mention> mentions;
  RetrievalMethod method = RetrievalMethod::kString;
  double relevance = 0.0;
  // Dense only: assessment score of every detected phrase, in phrase order.
  std::vector<double> phrase_scores;

  bool mentionless() const { return mentions.empty(); }
};

// Throws StructuralError when a mention leaves the sentence, points outside
// the table, or overlaps another mention.
void validate_pair(const AlignedPair& pair, const Table& table);

// {"table_id", "doc_id", "sentence_index", "sentence", "method", "relevance",
//  "mentionless", "mentions": [{"start","end","row","col","surface","score"}],
//  "phrase_scores": [real]}
Json pair_to_json(const AlignedPair& pair);
AlignedPair pair_from_json(const Json& record);

}  // namespace tqforge

#endif  // TQFORGE_ALIGNMENT_H_
