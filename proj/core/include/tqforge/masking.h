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
#ifndef TQFORGE_MASKING_H_
#define TQFORGE_MASKING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/alignment.h"
#include "tqforge/jsonl.h"
#include "tqforge/table.h"

namespace tqforge {

inline constexpr std::string_view kMaskToken = "[MASK]";
inline constexpr double kDefaultMaskRate = 0.15;

enum class MaskStrategy { kSalient, kRandom };

std::string_view strategy_name(MaskStrategy strategy);
MaskStrategy parse_strategy(std::string_view name);

struct MaskSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const MaskSpan&) const = default;
};

// Input is the target with every span replaced by a single kMaskToken.
// Target is the unmasked "<sentence> <linearized table>".
struct MaskedExample {
  std::string table_id;
  RetrievalMethod method = RetrievalMethod::kString;
  MaskStrategy strategy = MaskStrategy::kSalient;
  std::string input;
  std::string target;
  // Indices into tokenize(target) of the tokens covered by spans: the only
  // positions that carry loss.
  std::vector<std::size_t> masked_positions;
  // One per placeholder, sorted, byte offsets into target.
  std::vector<MaskSpan> spans;
  std::uint64_t seed = 0;

  bool operator==(const MaskedExample&) const = default;
};

// Fills input and masked_positions from target and spans. Spans must be
// sorted, disjoint, non-empty and aligned to token boundaries of target.
void apply_masks(MaskedExample& example);

// Splices the masked target spans back into input.
std::string reconstruct_target(const MaskedExample& example);

// Throws StructuralError if input/target/positions/spans disagree.
void validate_masked_example(const MaskedExample& example);

// Masks exactly the mention spans. Throws StructuralError for a
// mentionless pair.
MaskedExample mask_salient(const AlignedPair& pair, const Table& table);

// With probability 1/2 masks sentence words, otherwise whole table cells,
// each independently with probability rate. At least one unit is masked.
MaskedExample mask_random(const AlignedPair& pair, const Table& table,
                          double rate = kDefaultMaskRate, std::uint64_t seed = 0);

// {"task": "natural-mask", "table_id", "method", "strategy", "input", "target",
//  "masked_positions": [int], "mask_spans": [[start, end]], "seed"}
Json to_mask_record(const MaskedExample& example);
// Throws SchemaError, including for empty masked_positions.
MaskedExample parse_mask_record(const Json& record);

}  // namespace tqforge

#endif  // TQFORGE_MASKING_H_
