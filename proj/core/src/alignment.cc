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
#include "tqforge/alignment.h"

#include "tqforge/error.h"

namespace tqforge {

std::string_view method_name(RetrievalMethod method) {
  switch (method) {
    case RetrievalMethod::kString: return "string";
    case RetrievalMethod::kBm25: return "bm25";
    case RetrievalMethod::kDense: return "dense";
    case RetrievalMethod::kTitleHeuristic: return "title-heuristic";
  }
  return "string";
}

RetrievalMethod parse_method(std::string_view name) {
  if (name == "string") return RetrievalMethod::kString;
  if (name == "bm25") return RetrievalMethod::kBm25;
  if (name == "dense") return RetrievalMethod::kDense;
  if (name == "title-heuristic") return RetrievalMethod::kTitleHeuristic;
  throw ConfigError("unknown retrieval method '" + std::string(name) + "'");
}

void validate_pair(const AlignedPair& pair, const Table& table) {
  for (std::size_t k = 0; k < pair.mentions.size(); ++k) {
    const Mention& m = pair.mentions[k];
    if (m.char_start >= m.char_end || m.char_end > pair.sentence.text.size()) {
      throw StructuralError("mention span outside sentence");
    }
    if (m.cell_row >= table.num_total_rows() || m.cell_col >= table.num_columns()) {
      throw StructuralError("mention cell outside table");
    }
    if (pair.sentence.text.compare(m.char_start, m.char_end - m.char_start, m.surface) != 0) {
      throw StructuralError("mention surface does not match sentence text");
    }
    for (std::size_t other = 0; other < k; ++other) {
      if (m.overlaps(pair.mentions[other])) throw StructuralError("overlapping mentions");
    }
  }
}

Json pair_to_json(const AlignedPair& pair) {
  Json mentions = Json::array();
  for (const Mention& m : pair.mentions) {
    mentions.push_back({{"start", m.char_start}, {"end", m.char_end}, {"row", m.cell_row},
                        {"col", m.cell_col}, {"surface", m.surface}, {"score", m.score}});
  }
  return Json{{"table_id", pair.table_id},
              {"doc_id", pair.sentence.doc_id},
              {"sentence_index", pair.sentence.index},
              {"sentence", pair.sentence.text},
              {"method", method_name(pair.method)},
              {"relevance", pair.relevance},
              {"mentionless", pair.mentionless()},
              {"mentions", mentions},
              {"phrase_scores", pair.phrase_scores}};
}

AlignedPair pair_from_json(const Json& record) {
  check_keys(record, {"table_id", "doc_id", "sentence_index", "sentence", "method", "relevance",
                      "mentionless", "mentions", "phrase_scores"});
  AlignedPair pair;
  pair.table_id = require_string(record, "table_id");
  pair.sentence.doc_id = require_string(record, "doc_id");
  pair.sentence.index = static_cast<std::size_t>(require_int(record, "sentence_index"));
  pair.sentence.text = require_string(record, "sentence");
  pair.sentence.tokens = tokenize(pair.sentence.text);
  pair.method = parse_method(require_string(record, "method"));
  pair.relevance = require_number(record, "relevance");
  const Json& mentions = require(record, "mentions");
  if (!mentions.is_array()) throw SchemaError("field 'mentions' must be an array");
  for (const Json& m : mentions) {
    check_keys(m, {"start", "end", "row", "col", "surface", "score"});
    Mention mention;
    mention.char_start = static_cast<std::size_t>(require_int(m, "start"));
    mention.char_end = static_cast<std::size_t>(require_int(m, "end"));
    mention.cell_row = static_cast<std::size_t>(require_int(m, "row"));
    mention.cell_col = static_cast<std::size_t>(require_int(m, "col"));
    mention.surface = require_string(m, "surface");
    mention.score = require_number(m, "score");
    pair.mentions.push_back(std::move(mention));
  }
  if (record.contains("phrase_scores")) {
    for (const Json& s : record.at("phrase_scores")) {
      if (!s.is_number()) throw SchemaError("field 'phrase_scores' must contain numbers");
      pair.phrase_scores.push_back(s.get<double>());
    }
  }
  if (record.contains("mentionless") &&
      (!record.at("mentionless").is_boolean() ||
       record.at("mentionless").get<bool>() != pair.mentionless())) {
    throw SchemaError("field 'mentionless' disagrees with mentions");
  }
  return pair;
}

}  // namespace tqforge
