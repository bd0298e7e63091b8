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

#ifndef TQFORGE_SELFTRAIN_H_
#define TQFORGE_SELFTRAIN_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/sql.h"
#include "tqforge/sql_template.h"
#include "tqforge/table.h"

namespace tqforge {

inline constexpr std::size_t kDefaultBeam = 50;
inline constexpr std::size_t kDefaultTopK = 10000;

struct GeneratedQuestion {
  std::string text;
  double score = 0.0;  // generation log-likelihood or a stand-in
};

// SQL -> natural-language question candidates.
class Sql2NlGenerator {
 public:
  virtual ~Sql2NlGenerator() = default;
  // At most beam candidates, best first.
  virtual std::vector<GeneratedQuestion> generate(const SelectQuery& sql, std::size_t beam) const = 0;
};

// Knobs for rendering a question from a query.
struct VerbalizeOptions {
  bool keep_conditions = true;
  bool keep_subject = true;  // name the projected column
  bool keep_values = true;   // spell out literal values
  std::size_t prefix = 0;
  std::size_t connector = 0;
};

inline constexpr std::size_t kVerbalizePrefixes = 5;
inline constexpr std::size_t kVerbalizeConnectors = 4;

// Rule-based question for a query, e.g.
// "SELECT Film WHERE Year = 2002" -> "what is the Film when Year is 2002?".
std::string verbalize(const SelectQuery& sql, const VerbalizeOptions& options = {});

// Paraphrase variants of the rule-based question; the generation score
// falls with the variant's rank.
class TemplateVerbalizer : public Sql2NlGenerator {
 public:
  std::vector<GeneratedQuestion> generate(const SelectQuery& sql, std::size_t beam) const override;
};

// The faithful question first, then up to four corrupted ones: conditions
// dropped, projected column hidden, values hidden, and a generic question.
// Shorter questions get higher generation scores, so gen-max tends to pick
// a corrupted one.
class CorruptingVerbalizer : public Sql2NlGenerator {
 public:
  std::vector<GeneratedQuestion> generate(const SelectQuery& sql, std::size_t beam) const override;
};

struct VerifierInput {
  std::size_t sql_id = 0;
  std::size_t candidate_idx = 0;
  std::string_view question;
  const Table* table = nullptr;
  const SelectQuery* sql = nullptr;
  const AnswerList* answers = nullptr;
};

// Scores how likely a question elicits the gold answers; higher is better.
class QaVerifier {
 public:
  virtual ~QaVerifier() = default;
  virtual double score(const VerifierInput& input) const = 0;
};

// Fraction of the query's column-name and literal-value terms found in the
// question, minus 0.5 when the projected column is not mentioned.
class OverlapVerifier : public QaVerifier {
 public:
  double score(const VerifierInput& input) const override;
};

inline constexpr double kMissingAnswerColumnPenalty = 0.5;

// Scores produced elsewhere: one {"sql_id", "candidate_idx", "score"} per
// line. Throws ConfigError for a candidate without a score.
class ScoreFileVerifier : public QaVerifier {
 public:
  explicit ScoreFileVerifier(const std::filesystem::path& path);
  double score(const VerifierInput& input) const override;
  std::size_t size() const { return scores_.size(); }

 private:
  std::map<std::pair<std::size_t, std::size_t>, double> scores_;
};

struct Candidate {
  std::size_t sql_id = 0;
  std::size_t index = 0;
  std::string question;
  double gen_score = 0.0;
  std::optional<double> ver_score;
};

enum class Criterion { kGenMax, kVerMax, kVerMin };
std::string_view criterion_name(Criterion criterion);
Criterion parse_criterion(std::string_view name);  // throws ConfigError

// Distinct candidates (first occurrence kept), at most beam of them.
// Throws ConfigError for beam == 0 and Error for a non-finite score.
std::vector<Candidate> generate_candidates(std::size_t sql_id, const SelectQuery& sql,
                                           const Sql2NlGenerator& generator, std::size_t beam);

void verify_candidates(std::vector<Candidate>& candidates, const QaVerifier& verifier,
                       const Table& table, const SelectQuery& sql, const AnswerList& answers);

// The score a criterion maximizes: ver-min ranks by the negated ver_score.
double selection_score(const Candidate& candidate, Criterion criterion);

// Index of the winner; ties go to the lexicographically smallest question.
// Throws ConfigError on an empty pool or a missing ver_score.
std::size_t select_per_sql(std::span<const Candidate> candidates, Criterion criterion);

struct SelfTrainPair {
  std::size_t sql_id = 0;
  std::string table_id;
  std::string sql;
  std::string question;
  AnswerList answers;
  double gen_score = 0.0;
  double ver_score = 0.0;
  bool operator==(const SelfTrainPair&) const = default;
};

double selection_score(const SelfTrainPair& pair, Criterion criterion);

// The k best winners by the criterion's score, descending; ties by sql_id.
// k larger than the pool returns everything and notes it in diag.
std::vector<SelfTrainPair> select_topk(std::vector<SelfTrainPair> winners, std::size_t k,
                                       Criterion criterion, Diagnostics* diag = nullptr);

struct SelfTrainConfig {
  Criterion criterion = Criterion::kVerMax;
  std::size_t beam = kDefaultBeam;
  std::size_t k = kDefaultTopK;
};

struct SelfTrainResult {
  std::vector<SelfTrainPair> winners;   // one per usable SQL, input order
  std::vector<SelfTrainPair> selected;  // top-k of winners
};

// SQL whose table is missing, whose text does not parse, or whose generator
// call throws is skipped with a diagnostic.
SelfTrainResult run_selftrain(std::span<const SampledSql> sqls, const CorpusStore& store,
                              const Sql2NlGenerator& generator, const QaVerifier& verifier,
                              const SelfTrainConfig& config, Diagnostics* diag = nullptr);

// {"sql_id", "table_id", "sql", "question", "answers", "gen_score", "ver_score"}
Json selftrain_pair_to_json(const SelfTrainPair& pair);
SelfTrainPair selftrain_pair_from_json(const Json& record);

enum class Origin { kSupervised, kSelfTrain };
std::string_view origin_name(Origin origin);

struct SqlNlPair {
  std::string sql;
  std::string question;
};

// {"sql", "question"} per line; other keys are ignored.
std::vector<SqlNlPair> load_sql_nl_pairs(const std::filesystem::path& path);

struct TrainingPair {
  std::string sql;
  std::string question;
  Origin origin = Origin::kSupervised;
  bool operator==(const TrainingPair&) const = default;
};

// Supervised pairs, then selected ones; a selected question that exactly
// matches a supervised question is dropped.
std::vector<TrainingPair> assemble_training_set(std::span<const SqlNlPair> supervised,
                                                std::span<const SelfTrainPair> selected);

// {"sql", "question", "origin"}
Json training_pair_to_json(const TrainingPair& pair);

// {"task": "synthetic-qa", "table_id", "question", "answers"} per pair,
// after re-executing the SQL; missing tables and mismatching answers are
// dropped with a diagnostic.
std::vector<Json> emit_synthetic_qa(std::span<const SelfTrainPair> selected,
                                    const CorpusStore& store, Diagnostics* diag = nullptr);

}  // namespace tqforge

#endif  // TQFORGE_SELFTRAIN_H_
