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

#ifndef TQFORGE_STATS_H_
#define TQFORGE_STATS_H_

#include <array>
#include <cstddef>
#include <map>
#include <string>

#include "tqforge/alignment.h"
#include "tqforge/jsonl.h"
#include "tqforge/sql.h"

namespace tqforge {

// 0.1-wide bins over [-1, 1]; values outside are clamped to the end bins.
inline constexpr std::size_t kScoreBins = 20;
std::size_t score_bin(double score);
// "[0.5,0.6)"; the last bin is closed: "[0.9,1.0]".
std::string score_bin_label(std::size_t bin);

struct StatsReport {
  std::map<std::string, std::size_t> pairs_per_method;
  std::map<std::size_t, std::size_t> mentions_per_pair;  // mention count -> pairs
  std::array<std::size_t, kScoreBins> dense_scores{};    // phrase scores of dense pairs
  std::map<std::string, std::size_t> records_per_task;
  std::map<std::string, std::size_t> sql_keywords;
  std::size_t invalid_records = 0;
};

void add_pair(StatsReport& report, const AlignedPair& pair);
// Counts keyword occurrences: select, where, and, order by, asc, desc,
// limit, the aggregates, count(*), the comparison operators and
// "where = ( )" for a nested query.
void add_sql(StatsReport& report, const SelectQuery& query);
// Any task record; sql-qa records also feed the keyword counts.
void add_record(StatsReport& report, const Json& record);

Json stats_to_json(const StatsReport& report);

}  // namespace tqforge

#endif  // TQFORGE_STATS_H_
