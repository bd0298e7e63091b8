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

#include "tqforge/selftrain.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "tqforge/records.h"
#include "tqforge/sql_exec.h"
#include "tqforge/text.h"

namespace tqforge {

namespace {

constexpr std::array<std::string_view, kVerbalizePrefixes> kPrefixes = {
    "what is ", "tell me ", "find ", "give me ", "which is "};
constexpr std::array<std::string_view, kVerbalizeConnectors> kConnectors = {
    " when ", " where ", " for which ", " if "};

std::string subject(const SelectQuery& q, bool keep_subject) {
  const Projection& p = q.projection;
  if (p.star) return "the number of rows";
  const std::string col = keep_subject ? p.column.name : "entry";
  switch (p.agg) {
    case Aggregate::kNone: return "the " + col;
    case Aggregate::kCount: return "the number of " + col + " entries";
    case Aggregate::kSum: return "the total " + col;
    case Aggregate::kAvg: return "the average " + col;
    case Aggregate::kMin: return "the lowest " + col;
    case Aggregate::kMax: return "the highest " + col;
  }
  return col;
}

std::string_view op_phrase(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "is";
    case CompareOp::kNe: return "is not";
    case CompareOp::kLt: return "is less than";
    case CompareOp::kGt: return "is greater than";
    case CompareOp::kLe: return "is at most";
    case CompareOp::kGe: return "is at least";
  }
  return "is";
}

std::string order_phrase(const SelectQuery& q) {
  if (q.order_by) {
    const std::string& c = q.order_by->column.name;
    const std::string_view dir = q.order_by->descending ? "highest" : "lowest";
    if (!q.limit) {
      return "sorted by " + c + (q.order_by->descending ? " from highest to lowest" : " from lowest to highest");
    }
    if (q.limit->value == 1) return "with the " + std::string(dir) + " " + c;
    return "among the " + std::to_string(q.limit->value) + " rows with the " + std::string(dir) + " " + c;
  }
  if (q.limit) return "within the first " + std::to_string(q.limit->value) + " rows";
  return {};
}

std::string conditions(const SelectQuery& q, const VerbalizeOptions& opt);

std::string condition(const Predicate& pred, const VerbalizeOptions& opt) {
  std::string out = pred.column.name + " " + std::string(op_phrase(pred.op)) + " ";
  if (pred.has_subquery()) {
    const SelectQuery& sub = *std::get<Box<SelectQuery>>(pred.value);
    out += "the same as " + subject(sub, true);
    const std::string conds = conditions(sub, opt);
    if (!conds.empty()) out += " where " + conds;
    const std::string order = order_phrase(sub);
    if (!order.empty()) out += " " + order;
    return out;
  }
  out += opt.keep_values ? std::get<Literal>(pred.value).text : "something";
  return out;
}

std::string conditions(const SelectQuery& q, const VerbalizeOptions& opt) {
  std::string out;
  for (const Predicate& pred : q.predicates) {
    if (!out.empty()) out += " and ";
    out += condition(pred, opt);
  }
  return out;
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  for (const Token& t : tokenize(s)) n += t.is_word ? 1 : 0;
  return n;
}

void collect_targets(const SelectQuery& q, std::set<std::string>& terms) {
  for_each_column(q, [&](const ColumnRef& ref) {
    for (std::string& t : word_terms(ref.name)) terms.insert(std::move(t));
  });
  for (const Predicate& pred : q.predicates) {
    if (pred.has_subquery()) {
      collect_targets(*std::get<Box<SelectQuery>>(pred.value), terms);
    } else {
      for (std::string& t : word_terms(std::get<Literal>(pred.value).text)) terms.insert(std::move(t));
    }
  }
}

}  // namespace

std::string verbalize(const SelectQuery& sql, const VerbalizeOptions& options) {
  std::string out(kPrefixes[options.prefix % kPrefixes.size()]);
  out += subject(sql, options.keep_subject);
  if (options.keep_conditions) {
    const std::string conds = conditions(sql, options);
    if (!conds.empty()) {
      out += kConnectors[options.connector % kConnectors.size()];
      out += conds;
    }
    const std::string order = order_phrase(sql);
    if (!order.empty()) out += " " + order;
  }
  out += "?";
  return out;
}

std::vector<GeneratedQuestion> TemplateVerbalizer::generate(const SelectQuery& sql,
                                                            std::size_t beam) const {
  std::vector<GeneratedQuestion> out;
  for (std::size_t p = 0; p < kVerbalizePrefixes; ++p) {
    for (std::size_t c = 0; c < kVerbalizeConnectors; ++c) {
      if (out.size() >= beam) return out;
      VerbalizeOptions opt;
      opt.prefix = p;
      opt.connector = c;
      const double rank = static_cast<double>(out.size());
      out.push_back({verbalize(sql, opt), -0.1 * rank});
    }
  }
  return out;
}

std::vector<GeneratedQuestion> CorruptingVerbalizer::generate(const SelectQuery& sql,
                                                              std::size_t beam) const {
  std::vector<std::string> texts;
  texts.push_back(verbalize(sql));
  VerbalizeOptions opt;
  opt.keep_conditions = false;
  texts.push_back(verbalize(sql, opt));
  opt = {};
  opt.keep_subject = false;
  texts.push_back(verbalize(sql, opt));
  opt = {};
  opt.keep_values = false;
  texts.push_back(verbalize(sql, opt));
  texts.push_back("what is the answer?");
  std::vector<GeneratedQuestion> out;
  for (std::string& t : texts) {
    if (out.size() >= beam) break;
    const double score = -0.1 * static_cast<double>(count_words(t));
    out.push_back({std::move(t), score});
  }
  return out;
}

double OverlapVerifier::score(const VerifierInput& input) const {
  const std::vector<std::string> words = word_terms(input.question);
  const std::set<std::string> question(words.begin(), words.end());
  std::set<std::string> targets;
  collect_targets(*input.sql, targets);
  std::size_t hit = 0;
  for (const std::string& t : targets) hit += question.count(t);
  double s = targets.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(targets.size());
  const Projection& p = input.sql->projection;
  if (!p.star) {
    for (const std::string& t : word_terms(p.column.name)) {
      if (!question.count(t)) {
        s -= kMissingAnswerColumnPenalty;
        break;
      }
    }
  }
  return s;
}

ScoreFileVerifier::ScoreFileVerifier(const std::filesystem::path& path) {
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    try {
      const long long sql_id = require_int(record, "sql_id");
      const long long idx = require_int(record, "candidate_idx");
      const double score = require_number(record, "score");
      if (sql_id < 0 || idx < 0) throw SchemaError("negative id");
      if (!std::isfinite(score)) throw SchemaError("non-finite score");
      scores_[{static_cast<std::size_t>(sql_id), static_cast<std::size_t>(idx)}] = score;
    } catch (const Error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
}

double ScoreFileVerifier::score(const VerifierInput& input) const {
  auto it = scores_.find({input.sql_id, input.candidate_idx});
  if (it == scores_.end()) {
    throw ConfigError("no verifier score for sql " + std::to_string(input.sql_id) +
                      ", candidate " + std::to_string(input.candidate_idx));
  }
  return it->second;
}

std::string_view criterion_name(Criterion criterion) {
  switch (criterion) {
    case Criterion::kGenMax: return "gen-max";
    case Criterion::kVerMax: return "ver-max";
    case Criterion::kVerMin: return "ver-min";
  }
  return {};
}

Criterion parse_criterion(std::string_view name) {
  if (name == "gen-max") return Criterion::kGenMax;
  if (name == "ver-max") return Criterion::kVerMax;
  if (name == "ver-min") return Criterion::kVerMin;
  throw ConfigError("unknown criterion '" + std::string(name) + "'");
}

std::vector<Candidate> generate_candidates(std::size_t sql_id, const SelectQuery& sql,
                                           const Sql2NlGenerator& generator, std::size_t beam) {
  if (beam == 0) throw ConfigError("beam must be at least 1");
  std::vector<Candidate> out;
  std::set<std::string> seen;
  for (GeneratedQuestion& g : generator.generate(sql, beam)) {
    if (out.size() >= beam) break;
    if (!std::isfinite(g.score)) throw Error("generator returned a non-finite score");
    if (!seen.insert(g.text).second) continue;
    out.push_back({sql_id, out.size(), std::move(g.text), g.score, std::nullopt});
  }
  return out;
}

void verify_candidates(std::vector<Candidate>& candidates, const QaVerifier& verifier,
                       const Table& table, const SelectQuery& sql, const AnswerList& answers) {
  for (Candidate& c : candidates) {
    VerifierInput in{c.sql_id, c.index, c.question, &table, &sql, &answers};
    const double s = verifier.score(in);
    if (!std::isfinite(s)) throw Error("verifier returned a non-finite score");
    c.ver_score = s;
  }
}

double selection_score(const Candidate& candidate, Criterion criterion) {
  switch (criterion) {
    case Criterion::kGenMax: return candidate.gen_score;
    case Criterion::kVerMax:
    case Criterion::kVerMin:
      if (!candidate.ver_score) throw ConfigError("candidate has no verifier score");
      return criterion == Criterion::kVerMax ? *candidate.ver_score : -*candidate.ver_score;
  }
  return 0.0;
}

std::size_t select_per_sql(std::span<const Candidate> candidates, Criterion criterion) {
  if (candidates.empty()) throw ConfigError("no candidates to select from");
  std::size_t best = 0;
  double best_score = selection_score(candidates[0], criterion);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = selection_score(candidates[i], criterion);
    if (s > best_score || (s == best_score && candidates[i].question < candidates[best].question)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

double selection_score(const SelfTrainPair& pair, Criterion criterion) {
  switch (criterion) {
    case Criterion::kGenMax: return pair.gen_score;
    case Criterion::kVerMax: return pair.ver_score;
    case Criterion::kVerMin: return -pair.ver_score;
  }
  return 0.0;
}

std::vector<SelfTrainPair> select_topk(std::vector<SelfTrainPair> winners, std::size_t k,
                                       Criterion criterion, Diagnostics* diag) {
  std::stable_sort(winners.begin(), winners.end(), [&](const SelfTrainPair& a, const SelfTrainPair& b) {
    const double sa = selection_score(a, criterion);
    const double sb = selection_score(b, criterion);
    if (sa != sb) return sa > sb;
    return a.sql_id < b.sql_id;
  });
  if (k > winners.size()) {
    if (diag) {
      diag->warn("selftrain: k=" + std::to_string(k) + " exceeds the " +
                 std::to_string(winners.size()) + " available pairs; keeping all");
      diag->count("selftrain.k_shortfall", k - winners.size());
    }
  } else {
    winners.resize(k);
  }
  return winners;
}

SelfTrainResult run_selftrain(std::span<const SampledSql> sqls, const CorpusStore& store,
                              const Sql2NlGenerator& generator, const QaVerifier& verifier,
                              const SelfTrainConfig& config, Diagnostics* diag) {
  SelfTrainResult result;
  auto skip = [&](std::size_t id, const std::string& why) {
    if (diag) {
      diag->warn("selftrain: sql " + std::to_string(id) + " skipped: " + why);
      diag->count("selftrain.skipped");
    }
  };
  for (std::size_t id = 0; id < sqls.size(); ++id) {
    const SampledSql& rec = sqls[id];
    const Table* table = store.find_table(rec.table_id);
    if (!table) {
      skip(id, "unknown table '" + rec.table_id + "'");
      continue;
    }
    SqlQuery query;
    try {
      query = parse_sql(rec.sql);
    } catch (const ParseError& e) {
      skip(id, e.what());
      continue;
    }
    std::vector<Candidate> candidates;
    try {
      candidates = generate_candidates(id, query.ast, generator, config.beam);
    } catch (const Error& e) {
      skip(id, std::string("generator failed: ") + e.what());
      continue;
    }
    if (candidates.empty()) {
      skip(id, "generator returned no candidates");
      continue;
    }
    if (config.criterion != Criterion::kGenMax) {
      verify_candidates(candidates, verifier, *table, query.ast, rec.answers);
    }
    const Candidate& win = candidates[select_per_sql(candidates, config.criterion)];
    result.winners.push_back({id, rec.table_id, rec.sql, win.question, rec.answers, win.gen_score,
                              win.ver_score.value_or(0.0)});
  }
  result.selected = select_topk(result.winners, config.k, config.criterion, diag);
  return result;
}

Json selftrain_pair_to_json(const SelfTrainPair& pair) {
  return Json{{"sql_id", pair.sql_id},       {"table_id", pair.table_id},
              {"sql", pair.sql},             {"question", pair.question},
              {"answers", pair.answers.answers}, {"gen_score", pair.gen_score},
              {"ver_score", pair.ver_score}};
}

SelfTrainPair selftrain_pair_from_json(const Json& record) {
  check_keys(record, {"sql_id", "table_id", "sql", "question", "answers", "gen_score", "ver_score"});
  SelfTrainPair p;
  const long long id = require_int(record, "sql_id");
  if (id < 0) throw SchemaError("negative sql_id");
  p.sql_id = static_cast<std::size_t>(id);
  p.table_id = require_string(record, "table_id");
  p.sql = require_string(record, "sql");
  p.question = require_string(record, "question");
  p.answers.answers = require_string_array(record, "answers");
  p.gen_score = require_number(record, "gen_score");
  p.ver_score = require_number(record, "ver_score");
  return p;
}

std::string_view origin_name(Origin origin) {
  return origin == Origin::kSupervised ? "supervised" : "self-train";
}

std::vector<SqlNlPair> load_sql_nl_pairs(const std::filesystem::path& path) {
  std::vector<SqlNlPair> out;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    try {
      out.push_back({require_string(record, "sql"), require_string(record, "question")});
    } catch (const Error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::vector<TrainingPair> assemble_training_set(std::span<const SqlNlPair> supervised,
                                                std::span<const SelfTrainPair> selected) {
  std::vector<TrainingPair> out;
  std::set<std::string_view> questions;
  for (const SqlNlPair& p : supervised) {
    out.push_back({p.sql, p.question, Origin::kSupervised});
    questions.insert(p.question);
  }
  for (const SelfTrainPair& p : selected) {
    if (questions.count(p.question)) continue;
    out.push_back({p.sql, p.question, Origin::kSelfTrain});
  }
  return out;
}

Json training_pair_to_json(const TrainingPair& pair) {
  return Json{{"sql", pair.sql}, {"question", pair.question}, {"origin", origin_name(pair.origin)}};
}

std::vector<Json> emit_synthetic_qa(std::span<const SelfTrainPair> selected,
                                    const CorpusStore& store, Diagnostics* diag) {
  std::vector<Json> out;
  auto drop = [&](const SelfTrainPair& p, const std::string& why) {
    if (diag) {
      diag->warn("synthetic-qa: sql " + std::to_string(p.sql_id) + " dropped: " + why);
      diag->count("synthetic_qa.dropped");
    }
  };
  for (const SelfTrainPair& p : selected) {
    const Table* table = store.find_table(p.table_id);
    if (!table) {
      drop(p, "unknown table '" + p.table_id + "'");
      continue;
    }
    AnswerList answers;
    try {
      answers = execute_sql(parse_sql(p.sql).ast, *table);
    } catch (const Error& e) {
      drop(p, e.what());
      continue;
    }
    if (answers != p.answers) {
      drop(p, "answers differ on re-execution");
      continue;
    }
    out.push_back(Json{{"task", kTaskSyntheticQa},
                       {"table_id", p.table_id},
                       {"question", p.question},
                       {"answers", p.answers.answers}});
  }
  return out;
}

}  // namespace tqforge
