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

#include <string>
#include <vector>

#include "support/generators.h"
#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/lexical.h"
#include "tqforge/masking.h"
#include "tqforge/rng.h"

namespace tqforge {
namespace {

AlignedPair pair_for(const Table& table, const std::string& text, RetrievalMethod method = RetrievalMethod::kString) {
  AlignedPair p;
  p.table_id = table.id;
  p.sentence = make_sentence(text, {0, text.size()}, "doc", 0);
  p.method = method;
  return p;
}

Mention mention_of(const std::string& text, const std::string& surface, std::size_t row, std::size_t col) {
  const std::size_t at = text.find(surface);
  return Mention{at, at + surface.size(), row, col, surface, 1.0};
}

const Table& fig_table() {
  static const Table t{"fig", {"Year", "Film", "Gross"},
                       {{"2002", "Spider-Man", "$114,844,116"}, {"2008", "The Dark Knight", "$158,411,483"}},
                       "doc"};
  return t;
}

TEST(MaskSalient, MasksEachMentionWithOnePlaceholder) {
  const std::string s = "In 2002, Spider-Man broke the opening-weekend record with $114.8 million.";
  AlignedPair p = pair_for(fig_table(), s);
  p.mentions = {mention_of(s, "Spider-Man", 1, 1), mention_of(s, "$114.8 million", 1, 2)};
  const MaskedExample ex = mask_salient(p, fig_table());
  EXPECT_EQ(ex.input,
            "In 2002, [MASK] broke the opening-weekend record with [MASK]. "
            "col: Year | Film | Gross row 1: 2002 | Spider-Man | $114,844,116 "
            "row 2: 2008 | The Dark Knight | $158,411,483");
  EXPECT_EQ(ex.target, build_model_input(s, fig_table()));
  ASSERT_EQ(ex.spans.size(), 2u);
  // "Spider", "-", "Man" then "$", "114", ".", "8", "million".
  EXPECT_EQ(ex.masked_positions.size(), 8u);
  EXPECT_EQ(reconstruct_target(ex), ex.target);
  EXPECT_NO_THROW(validate_masked_example(ex));
}

TEST(MaskSalient, AdjacentMentionsStaySeparate) {
  const Table t{"t", {"A", "B"}, {{"New", "York"}}, "d"};
  const std::string s = "New York";
  AlignedPair p = pair_for(t, s);
  p.mentions = {Mention{0, 3, 1, 0, "New", 1.0}, Mention{4, 8, 1, 1, "York", 1.0}};
  const MaskedExample ex = mask_salient(p, t);
  EXPECT_EQ(ex.input.substr(0, 13), "[MASK] [MASK]");
  EXPECT_EQ(ex.spans.size(), 2u);

  AlignedPair one = pair_for(t, s);
  one.mentions = {Mention{4, 8, 1, 1, "York", 1.0}};
  const MaskedExample single = mask_salient(one, t);
  EXPECT_EQ(single.spans.size(), 1u);
  EXPECT_EQ(single.input.substr(0, 10), "New [MASK]");
}

TEST(MaskSalient, MentionlessPairRejected) {
  EXPECT_THROW(mask_salient(pair_for(fig_table(), "Nothing here."), fig_table()), StructuralError);
}

TEST(MaskRandom, FixedSeedIsReproducible) {
  const std::string s = "one two three four five six seven eight nine ten eleven twelve thirteen fourteen "
                        "fifteen sixteen seventeen eighteen nineteen twenty";
  const AlignedPair p = pair_for(fig_table(), s);
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    EXPECT_EQ(mask_random(p, fig_table(), 0.15, seed), mask_random(p, fig_table(), 0.15, seed));
  }
  EXPECT_THROW(mask_random(p, fig_table(), 0.0, 1), ConfigError);
  EXPECT_THROW(mask_random(p, fig_table(), 1.0, 1), ConfigError);
}

TEST(MaskRandom, TinyRateStillMasksSomething) {
  const AlignedPair p = pair_for(fig_table(), "Just four words here.");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MaskedExample ex = mask_random(p, fig_table(), 1e-9, seed);
    EXPECT_FALSE(ex.masked_positions.empty());
    EXPECT_NO_THROW(validate_masked_example(ex));
  }
}

// Table-side draw: masked cells turn into placeholders in the linearized
// table while the markers stay put.
TEST(MaskRandom, TableSideReplacesWholeCells) {
  const Table t{"t", {"Year", "Film"}, {{"2002", "Spider-Man"}}, "d"};
  const std::string s = "A short sentence.";
  const AlignedPair p = pair_for(t, s);
  int table_side = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const MaskedExample ex = mask_random(p, t, 0.5, seed);
    if (ex.spans.front().start <= s.size()) continue;
    ++table_side;
    const std::size_t offset = s.size() + 1;
    const LinearizedTable lin = linearize_table_with_spans(t);
    Table masked = t;
    for (const MaskSpan& span : ex.spans) {
      bool found = false;
      for (std::size_t r = 0; r < lin.cell_spans.size(); ++r) {
        for (std::size_t c = 0; c < lin.cell_spans[r].size(); ++c) {
          if (lin.cell_spans[r][c].start + offset == span.start && lin.cell_spans[r][c].end + offset == span.end) {
            (r == 0 ? masked.header[c] : masked.rows[r - 1][c]) = std::string(kMaskToken);
            found = true;
          }
        }
      }
      EXPECT_TRUE(found) << "span is not a whole cell";
    }
    EXPECT_EQ(ex.input, s + " " + linearize_table(masked));
    EXPECT_EQ(ex.input.rfind(s + " col: ", 0), 0u);
  }
  EXPECT_GT(table_side, 10);
}

TEST(MaskRecord, RoundTrip) {
  const Table t{"ü", {"Stadt"}, {{"Zürich"}}, "d"};
  const std::string s = "Zürich is a city.";
  AlignedPair p = pair_for(t, s);
  p.mentions = {Mention{0, 7, 1, 0, "Zürich", 1.0}};
  const MaskedExample ex = mask_salient(p, t);
  const Json j = to_mask_record(ex);
  EXPECT_EQ(j.at("task"), "natural-mask");
  EXPECT_EQ(parse_mask_record(Json::parse(dump_line(j))), ex);
  EXPECT_EQ(dump_line(to_mask_record(parse_mask_record(j))), dump_line(j));
}

TEST(MaskRecord, RejectsEmptyPositionsAndInconsistency) {
  const std::string s = "Spider-Man won.";
  AlignedPair p = pair_for(fig_table(), s);
  p.mentions = {mention_of(s, "Spider-Man", 1, 1)};
  const Json good = to_mask_record(mask_salient(p, fig_table()));

  Json empty = good;
  empty["masked_positions"] = Json::array();
  EXPECT_THROW(parse_mask_record(empty), SchemaError);

  Json shifted = good;
  shifted["masked_positions"] = {0, 1};
  EXPECT_THROW(parse_mask_record(shifted), SchemaError);

  Json tampered = good;
  tampered["input"] = "[MASK] lost. " + linearize_table(fig_table());
  EXPECT_THROW(parse_mask_record(tampered), SchemaError);

  Json extra = good;
  extra["bogus"] = 1;
  EXPECT_THROW(parse_mask_record(extra), SchemaError);

  MaskedExample none;
  EXPECT_THROW(to_mask_record(none), SchemaError);
}

// Salient examples mask exactly the mention spans; every example splices
// back into its target and survives a record round trip.
TEST(MaskingProperty, RoundTripOnRandomPairs) {
  Rng rng(59);
  int salient = 0;
  for (int iter = 0; iter < 500; ++iter) {
    const Table t = testing::random_table(rng, 4, 4);
    std::string text = testing::random_phrase(rng, 2, 8);
    for (std::size_t k = 0, n = rng.index(3); k < n; ++k) {
      text += " " + t.cell(rng.index(t.num_total_rows()), rng.index(t.num_columns()));
    }
    AlignedPair p = pair_for(t, text);
    p.mentions = detect_mentions_string(t, p.sentence);
    std::vector<MaskedExample> examples = {mask_random(p, t, 0.15, rng.next())};
    if (!p.mentionless()) {
      examples.push_back(mask_salient(p, t));
      ++salient;
      const MaskedExample& ex = examples.back();
      ASSERT_EQ(ex.spans.size(), p.mentions.size());
      for (std::size_t i = 0; i < ex.spans.size(); ++i) {
        EXPECT_EQ(ex.spans[i].start, p.mentions[i].char_start);
        EXPECT_EQ(ex.spans[i].end, p.mentions[i].char_end);
      }
    }
    for (const MaskedExample& ex : examples) {
      EXPECT_EQ(reconstruct_target(ex), ex.target);
      EXPECT_EQ(ex.target, build_model_input(text, t));
      EXPECT_EQ(parse_mask_record(to_mask_record(ex)), ex);
    }
  }
  EXPECT_GT(salient, 100);
}

}  // namespace
}  // namespace tqforge
