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

#include "tqforge/stats.h"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "tqforge/records.h"

namespace tqforge {

std::size_t score_bin(double score) {
  if (std::isnan(score)) return 0;
  const double idx = std::floor(score * 10.0 + 1e-9) + 10.0;
  if (idx < 0.0) return 0;
  if (idx >= static_cast<double>(kScoreBins)) return kScoreBins - 1;
  return static_cast<std::size_t>(idx);
}

std::string score_bin_label(std::size_t bin) {
  const double lo = (static_cast<double>(bin) - 10.0) / 10.0;
  const double hi = lo + 0.1;
  char buf[32];
  std::snprintf(buf, sizeof buf, "[%.1f,%.1f%c", lo == 0.0 ? 0.0 : lo, std::abs(hi) < 1e-12 ? 0.0 : hi,
                bin + 1 == kScoreBins ? ']' : ')');
  return buf;
}

void add_pair(StatsReport& report, const AlignedPair& pair) {
  ++report.pairs_per_method[std::string(method_name(pair.method))];
  ++report.mentions_per_pair[pair.mentions.size()];
  if (pair.method == RetrievalMethod::kDense) {
    for (double s : pair.phrase_scores) ++report.dense_scores[score_bin(s)];
  }
}

void add_sql(StatsReport& report, const SelectQuery& q) {
  auto& kw = report.sql_keywords;
  ++kw["select"];
  const Projection& p = q.projection;
  if (p.star) {
    ++kw["count(*)"];
  } else if (p.agg != Aggregate::kNone) {
    std::string name(aggregate_keyword(p.agg));
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ++kw[name];
  }
  if (!q.predicates.empty()) ++kw["where"];
  if (q.predicates.size() > 1) kw["and"] += q.predicates.size() - 1;
  for (const Predicate& pred : q.predicates) {
    ++kw[std::string(compare_symbol(pred.op))];
    if (pred.has_subquery()) {
      ++kw["where = ( )"];
      add_sql(report, *std::get<Box<SelectQuery>>(pred.value));
    }
  }
  if (q.order_by) {
    ++kw["order by"];
    ++kw[q.order_by->descending ? "desc" : "asc"];
  }
  if (q.limit) ++kw["limit"];
}

void add_record(StatsReport& report, const Json& record) {
  Task task;
  try {
    task = validate_record(record);
  } catch (const Error&) {
    ++report.invalid_records;
    return;
  }
  ++report.records_per_task[std::string(task_name(task))];
  if (task == Task::kSqlQa) add_sql(report, parse_sql(record["sql"].get<std::string>()).ast);
}

Json stats_to_json(const StatsReport& report) {
  Json hist = Json::array();
  for (std::size_t b = 0; b < kScoreBins; ++b) {
    hist.push_back(Json{{"bin", score_bin_label(b)}, {"count", report.dense_scores[b]}});
  }
  Json mentions = Json::object();
  for (const auto& [n, c] : report.mentions_per_pair) mentions[std::to_string(n)] = c;
  return Json{{"pairs_per_method", report.pairs_per_method},
              {"mentions_per_pair", mentions},
              {"dense_score_histogram", hist},
              {"records_per_task", report.records_per_task},
              {"sql_keywords", report.sql_keywords},
              {"invalid_records", report.invalid_records}};
}

}  // namespace tqforge
