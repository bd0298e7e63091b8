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

#ifndef TQFORGE_MIXTURE_H_
#define TQFORGE_MIXTURE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "tqforge/corpus.h"
#include "tqforge/error.h"
#include "tqforge/jsonl.h"
#include "tqforge/records.h"

namespace tqforge {

inline constexpr std::size_t kNumTasks = 3;

inline std::size_t task_index(Task task) { return static_cast<std::size_t>(task); }

struct StreamSpec {
  bool enabled = true;
  double ratio = 1.0;
  // Takes precedence over ratio: keep this many records (or all, if fewer).
  std::optional<std::size_t> count;
};

struct MixtureConfig {
  std::array<StreamSpec, kNumTasks> streams;  // indexed by task_index()
  std::uint64_t seed = 0;
  bool shuffle = true;
};

// Throws ConfigError for a negative or non-finite ratio, or when no stream
// is enabled.
void validate_mixture_config(const MixtureConfig& config);

// {"seed": int, "shuffle": bool, "streams": {"natural-mask": {"ratio": r} |
// {"count": n} | false, ...}}; absent streams keep ratio 1.
MixtureConfig mixture_config_from_json(const Json& j);
Json mixture_config_to_json(const MixtureConfig& config);

// Records of one stream, each validated against the task schema. Throws
// SchemaError naming the line for a bad record or a record of another task.
std::vector<Json> load_stream(const std::filesystem::path& path, Task task);

// Adds "input" and "output": for QA records input is the question (or the
// SQL) followed by the linearized table and output the joined answers; for
// mask records output is the target. Throws SchemaError for unknown tables.
Json to_mixture_record(const Json& record, const CorpusStore& store);

// How many records each stream contributes. Ratio streams get the largest
// total whose proportional quotas fit the available records.
std::array<std::size_t, kNumTasks> mixture_quotas(const std::array<std::size_t, kNumTasks>& available,
                                                  const MixtureConfig& config);

// Subsamples every stream to its quota (keeping relative order), converts
// the records, concatenates and shuffles them when configured.
std::vector<Json> build_mixture(const std::array<std::vector<Json>, kNumTasks>& streams,
                                const CorpusStore& store, const MixtureConfig& config,
                                Diagnostics* diag = nullptr);

void emit_mixture(const std::array<std::vector<Json>, kNumTasks>& streams, const CorpusStore& store,
                  const MixtureConfig& config, const std::filesystem::path& out,
                  Diagnostics* diag = nullptr);

}  // namespace tqforge

#endif  // TQFORGE_MIXTURE_H_
