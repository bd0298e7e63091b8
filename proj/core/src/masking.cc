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
#include "tqforge/masking.h"

#include <algorithm>

#include "tqforge/error.h"
#include "tqforge/records.h"
#include "tqforge/rng.h"

namespace tqforge {

std::string_view strategy_name(MaskStrategy strategy) {
  return strategy == MaskStrategy::kSalient ? "salient" : "random";
}

MaskStrategy parse_strategy(std::string_view name) {
  if (name == "salient") return MaskStrategy::kSalient;
  if (name == "random") return MaskStrategy::kRandom;
  throw ConfigError("unknown masking strategy '" + std::string(name) + "'");
}

void apply_masks(MaskedExample& example) {
  if (example.spans.empty()) throw StructuralError("masked example without masked spans");
  const auto tokens = tokenize(example.target);
  example.input.clear();
  example.masked_positions.clear();
  std::size_t cursor = 0;
  std::size_t t = 0;
  for (const MaskSpan& span : example.spans) {
    if (span.start >= span.end || span.start < cursor || span.end > example.target.size()) {
      throw StructuralError("mask spans must be non-empty, sorted and disjoint");
    }
    while (t < tokens.size() && tokens[t].end <= span.start) ++t;
    if (t == tokens.size() || tokens[t].start != span.start) {
      throw StructuralError("mask span does not start on a token boundary");
    }
    const std::size_t first = t;
    while (t < tokens.size() && tokens[t].end <= span.end) example.masked_positions.push_back(t++);
    if (t == first || tokens[t - 1].end != span.end) {
      throw StructuralError("mask span does not end on a token boundary");
    }
    example.input.append(example.target, cursor, span.start - cursor);
    example.input += kMaskToken;
    cursor = span.end;
  }
  example.input.append(example.target, cursor, std::string::npos);
}

std::string reconstruct_target(const MaskedExample& example) {
  std::string out;
  std::size_t in_pos = 0;
  std::size_t target_pos = 0;
  for (const MaskSpan& span : example.spans) {
    if (span.start < target_pos || span.end > example.target.size() || span.start > span.end) {
      throw StructuralError("mask spans out of order");
    }
    const std::size_t keep = span.start - target_pos;
    if (in_pos + keep + kMaskToken.size() > example.input.size() ||
        std::string_view(example.input).substr(in_pos + keep, kMaskToken.size()) != kMaskToken) {
      throw StructuralError("input has no placeholder where a span was masked");
    }
    out.append(example.input, in_pos, keep);
    out.append(example.target, span.start, span.end - span.start);
    in_pos += keep + kMaskToken.size();
    target_pos = span.end;
  }
  out.append(example.input, in_pos, std::string::npos);
  return out;
}

void validate_masked_example(const MaskedExample& example) {
  if (example.masked_positions.empty()) throw StructuralError("no masked positions");
  if (reconstruct_target(example) != example.target) {
    throw StructuralError("input does not splice back into target");
  }
  MaskedExample copy = example;
  apply_masks(copy);
  if (copy.input != example.input || copy.masked_positions != example.masked_positions) {
    throw StructuralError("masked positions disagree with spans");
  }
}

namespace {

MaskedExample base_example(const AlignedPair& pair, const Table& table, MaskStrategy strategy) {
  if (pair.sentence.text.empty()) throw StructuralError("pair has an empty sentence");
  MaskedExample ex;
  ex.table_id = pair.table_id;
  ex.method = pair.method;
  ex.strategy = strategy;
  ex.target = build_model_input(pair.sentence.text, table);
  return ex;
}

}  // namespace

MaskedExample mask_salient(const AlignedPair& pair, const Table& table) {
  if (pair.mentionless()) {
    throw StructuralError("salient masking needs at least one mention (table '" + pair.table_id +
                          "')");
  }
  MaskedExample ex = base_example(pair, table, MaskStrategy::kSalient);
  for (const Mention& m : pair.mentions) ex.spans.push_back({m.char_start, m.char_end});
  std::sort(ex.spans.begin(), ex.spans.end(),
            [](const MaskSpan& a, const MaskSpan& b) { return a.start < b.start; });
  apply_masks(ex);
  return ex;
}

MaskedExample mask_random(const AlignedPair& pair, const Table& table, double rate,
                          std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) throw ConfigError("mask rate must lie in (0, 1)");
  MaskedExample ex = base_example(pair, table, MaskStrategy::kRandom);
  ex.seed = seed;

  std::vector<MaskSpan> sentence_units;
  for (const Token& t : pair.sentence.tokens) {
    if (t.is_word) sentence_units.push_back({t.start, t.end});
  }
  std::vector<MaskSpan> cell_units;
  const std::size_t table_offset = pair.sentence.text.size() + 1;
  const LinearizedTable lin = linearize_table_with_spans(table);
  for (const auto& row : lin.cell_spans) {
    for (const CellSpan& c : row) {
      // Cells with no tokens (empty or whitespace) cannot be masked.
      if (tokenize(std::string_view(lin.text).substr(c.start, c.end - c.start)).empty()) continue;
      cell_units.push_back({table_offset + c.start, table_offset + c.end});
    }
  }

  Rng rng(seed);
  const bool sentence_side = rng.bernoulli(0.5);
  const std::vector<MaskSpan>* units = sentence_side ? &sentence_units : &cell_units;
  if (units->empty()) units = sentence_side ? &cell_units : &sentence_units;
  if (units->empty()) throw StructuralError("nothing to mask in pair for table '" + pair.table_id + "'");

  // Resample until something is drawn; after that many misses pick one unit.
  constexpr int kMaxDraws = 1000;
  for (int draw = 0; draw < kMaxDraws && ex.spans.empty(); ++draw) {
    for (const MaskSpan& u : *units) {
      if (rng.bernoulli(rate)) ex.spans.push_back(u);
    }
  }
  if (ex.spans.empty()) ex.spans.push_back((*units)[rng.index(units->size())]);
  apply_masks(ex);
  return ex;
}

Json to_mask_record(const MaskedExample& example) {
  if (example.masked_positions.empty()) throw SchemaError("mask record without masked positions");
  Json spans = Json::array();
  for (const MaskSpan& s : example.spans) spans.push_back({s.start, s.end});
  return Json{{"task", kTaskNaturalMask},
              {"table_id", example.table_id},
              {"method", method_name(example.method)},
              {"strategy", strategy_name(example.strategy)},
              {"input", example.input},
              {"target", example.target},
              {"masked_positions", example.masked_positions},
              {"mask_spans", spans},
              {"seed", example.seed}};
}

MaskedExample parse_mask_record(const Json& record) {
  check_keys(record, {"task", "table_id", "method", "strategy", "input", "target",
                      "masked_positions", "mask_spans", "seed"});
  if (require_string(record, "task") != kTaskNaturalMask) throw SchemaError("task is not natural-mask");
  MaskedExample ex;
  ex.table_id = require_string(record, "table_id");
  ex.method = parse_method(require_string(record, "method"));
  ex.strategy = parse_strategy(require_string(record, "strategy"));
  ex.input = require_string(record, "input");
  ex.target = require_string(record, "target");
  const Json& seed = require(record, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw SchemaError("field 'seed' must be a non-negative integer");
  }
  ex.seed = seed.get<std::uint64_t>();
  const Json& positions = require(record, "masked_positions");
  if (!positions.is_array() || positions.empty()) {
    throw SchemaError("field 'masked_positions' must be a non-empty array");
  }
  for (const Json& p : positions) {
    if (!p.is_number_integer() || p.get<long long>() < 0) {
      throw SchemaError("masked_positions must hold non-negative integers");
    }
    ex.masked_positions.push_back(p.get<std::size_t>());
  }
  const Json& spans = require(record, "mask_spans");
  if (!spans.is_array()) throw SchemaError("field 'mask_spans' must be an array");
  for (const Json& s : spans) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer() ||
        s[0].get<long long>() < 0 || s[1].get<long long>() < 0) {
      throw SchemaError("mask_spans entries must be [start, end] pairs");
    }
    ex.spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
  }
  try {
    validate_masked_example(ex);
  } catch (const StructuralError& e) {
    throw SchemaError(std::string("inconsistent mask record: ") + e.what());
  }
  return ex;
}

}  // namespace tqforge
