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

#ifndef TQFORGE_PIPELINE_H_
#define TQFORGE_PIPELINE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tqforge/alignment.h"
#include "tqforge/corpus.h"
#include "tqforge/dense.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/masking.h"
#include "tqforge/mixture.h"
#include "tqforge/selftrain.h"
#include "tqforge/sql_template.h"

namespace tqforge {

struct RetrievalSettings {
  RetrievalMethod method = RetrievalMethod::kString;
  double tau = kDefaultTau;
  std::string provider = "stub";  // "stub" or "file:<path>"
};

struct MaskSettings {
  MaskStrategy strategy = MaskStrategy::kSalient;
  double rate = kDefaultMaskRate;
};

struct SelfTrainSettings {
  SelfTrainConfig config;
  std::string generator = "template";  // "template" or "corrupting"
  std::string verifier = "overlap";    // "overlap" or "file:<path>"
};

struct PipelineConfig {
  std::filesystem::path tables;
  std::filesystem::path documents;
  std::filesystem::path templates;
  std::filesystem::path supervised;  // optional (sql, question) pairs
  std::filesystem::path work_dir;
  std::filesystem::path output;  // defaults to <work_dir>/mixture.jsonl
  std::uint64_t seed = 0;
  RetrievalSettings retrieval;
  MaskSettings masking;
  std::size_t sql_count = 100;
  SamplerConfig sampler;
  SelfTrainSettings selftrain;
  MixtureConfig mixture;
};

// Relative paths are resolved against base_dir. The mixture seed defaults
// to the global seed. Throws ConfigError.
PipelineConfig pipeline_config_from_json(const Json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
// Settings only; paths are left out so the result does not depend on
// where the run happens.
Json pipeline_settings_to_json(const PipelineConfig& config);

std::unique_ptr<EmbeddingProvider> make_embedding_provider(std::string_view spec);
std::unique_ptr<Sql2NlGenerator> make_generator(std::string_view name);
std::unique_ptr<QaVerifier> make_verifier(std::string_view spec);

// One pair per table with a usable sentence, in table id order.
std::vector<AlignedPair> retrieve_pairs(const CorpusStore& store, const RetrievalSettings& settings,
                                        Diagnostics* diag = nullptr);

// Record i is masked with seed ^ i. Salient masking skips mentionless
// pairs with a diagnostic.
std::vector<MaskedExample> mask_pairs(std::span<const AlignedPair> pairs, const CorpusStore& store,
                                      const MaskSettings& settings, std::uint64_t seed,
                                      Diagnostics* diag = nullptr);

// A stage failure; the message names the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

inline constexpr std::array<std::string_view, 6> kStageNames = {
    "ingest", "retrieve", "mask", "sample-sql", "selftrain", "emit"};

struct StageReport {
  std::string name;
  bool resumed = false;  // outputs reused from a valid checkpoint
  std::size_t records = 0;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  std::filesystem::path output;
  Json stats;
};

// Runs ingest -> retrieve -> mask -> sample-sql -> selftrain -> emit. Each
// stage writes its JSONL outputs into work_dir plus a "<stage>.done" file
// recording a fingerprint of the settings, inputs and upstream outputs and
// a hash of every output. A stage whose checkpoint still matches is
// skipped; a checkpoint whose files no longer match their hashes is re-run
// with a warning.
PipelineResult run_pipeline(const PipelineConfig& config, Diagnostics* diag = nullptr);

}  // namespace tqforge

#endif  // TQFORGE_PIPELINE_H_
