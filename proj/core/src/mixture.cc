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

#include "tqforge/mixture.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tqforge/rng.h"
#include "tqforge/table.h"

namespace tqforge {

namespace {

constexpr std::array<Task, kNumTasks> kTasks = {Task::kNaturalMask, Task::kSyntheticQa, Task::kSqlQa};

bool contributes(const StreamSpec& s) {
  return s.enabled && (s.count ? *s.count > 0 : s.ratio > 0.0);
}

}  // namespace

void validate_mixture_config(const MixtureConfig& config) {
  bool any = false;
  for (Task t : kTasks) {
    const StreamSpec& s = config.streams[task_index(t)];
    if (!std::isfinite(s.ratio) || s.ratio < 0.0) {
      throw ConfigError("stream '" + std::string(task_name(t)) + "' has an invalid ratio");
    }
    any = any || contributes(s);
  }
  if (!any) throw ConfigError("mixture has no enabled stream");
}

MixtureConfig mixture_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("mixture config is not an object");
  MixtureConfig config;
  try {
    check_keys(j, {"seed", "shuffle", "streams"});
    if (j.contains("seed")) {
      const long long seed = require_int(j, "seed");
      if (seed < 0) throw ConfigError("seed must be non-negative");
      config.seed = static_cast<std::uint64_t>(seed);
    }
    if (j.contains("shuffle")) {
      if (!j["shuffle"].is_boolean()) throw ConfigError("shuffle must be a boolean");
      config.shuffle = j["shuffle"].get<bool>();
    }
    if (j.contains("streams")) {
      const Json& streams = j["streams"];
      if (!streams.is_object()) throw ConfigError("streams must be an object");
      for (const auto& [name, spec] : streams.items()) {
        StreamSpec& s = config.streams[task_index(parse_task(name))];
        if (spec.is_boolean()) {
          s.enabled = spec.get<bool>();
          continue;
        }
        check_keys(spec, {"ratio", "count", "enabled"});
        if (spec.contains("enabled")) s.enabled = spec["enabled"].get<bool>();
        if (spec.contains("ratio")) s.ratio = require_number(spec, "ratio");
        if (spec.contains("count")) {
          const long long n = require_int(spec, "count");
          if (n < 0) throw ConfigError("count must be non-negative");
          s.count = static_cast<std::size_t>(n);
        }
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("mixture config: ") + e.what());
  }
  validate_mixture_config(config);
  return config;
}

Json mixture_config_to_json(const MixtureConfig& config) {
  Json streams = Json::object();
  for (Task t : kTasks) {
    const StreamSpec& s = config.streams[task_index(t)];
    Json spec{{"enabled", s.enabled}, {"ratio", s.ratio}};
    if (s.count) spec["count"] = *s.count;
    streams[std::string(task_name(t))] = spec;
  }
  return Json{{"seed", config.seed}, {"shuffle", config.shuffle}, {"streams", streams}};
}

std::vector<Json> load_stream(const std::filesystem::path& path, Task task) {
  std::vector<Json> out;
  for_each_jsonl(path, [&](std::size_t line_no, const Json& record) {
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    Task got;
    try {
      got = validate_record(record);
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    }
    if (got != task) {
      throw SchemaError(where + "expected a " + std::string(task_name(task)) + " record, got " +
                        std::string(task_name(got)));
    }
    out.push_back(record);
  });
  return out;
}

Json to_mixture_record(const Json& record, const CorpusStore& store) {
  const Task task = validate_record(record);
  Json out = record;
  if (task == Task::kNaturalMask) {
    out["output"] = record["target"];
    return out;
  }
  const std::string table_id = require_string(record, "table_id");
  const Table* table = store.find_table(table_id);
  if (!table) throw SchemaError("unknown table '" + table_id + "'");
  const std::string context = require_string(record, task == Task::kSqlQa ? "sql" : "question");
  out["input"] = build_model_input(context, *table);
  out["output"] = join_answers(AnswerList{require_string_array(record, "answers")}).text;
  return out;
}

std::array<std::size_t, kNumTasks> mixture_quotas(const std::array<std::size_t, kNumTasks>& available,
                                                  const MixtureConfig& config) {
  std::array<std::size_t, kNumTasks> quota{};
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < kNumTasks; ++i) {
    const StreamSpec& s = config.streams[i];
    if (!s.enabled) continue;
    if (s.count) {
      quota[i] = std::min(*s.count, available[i]);
    } else if (s.ratio > 0.0) {
      ratio_sum += s.ratio;
    }
  }
  if (ratio_sum <= 0.0) return quota;
  double total = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kNumTasks; ++i) {
    const StreamSpec& s = config.streams[i];
    if (!s.enabled || s.count || s.ratio <= 0.0) continue;
    total = std::min(total, static_cast<double>(available[i]) * ratio_sum / s.ratio);
  }
  for (std::size_t i = 0; i < kNumTasks; ++i) {
    const StreamSpec& s = config.streams[i];
    if (!s.enabled || s.count || s.ratio <= 0.0) continue;
    const double share = std::floor(total * s.ratio / ratio_sum + 1e-9);
    quota[i] = std::min(available[i], static_cast<std::size_t>(share));
  }
  return quota;
}

std::vector<Json> build_mixture(const std::array<std::vector<Json>, kNumTasks>& streams,
                                const CorpusStore& store, const MixtureConfig& config,
                                Diagnostics* diag) {
  validate_mixture_config(config);
  std::array<std::size_t, kNumTasks> available{};
  for (std::size_t i = 0; i < kNumTasks; ++i) available[i] = streams[i].size();
  const auto quota = mixture_quotas(available, config);

  std::vector<Json> out;
  for (std::size_t i = 0; i < kNumTasks; ++i) {
    std::vector<std::size_t> keep(available[i]);
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    if (quota[i] < available[i]) {
      Rng rng(derive_seed(config.seed, i));
      rng.shuffle(keep);
      keep.resize(quota[i]);
      std::sort(keep.begin(), keep.end());
      if (diag) diag->count("mixture.subsampled." + std::string(task_name(kTasks[i])), available[i] - quota[i]);
    }
    for (std::size_t idx : keep) {
      const Json& record = streams[i][idx];
      Json converted;
      try {
        converted = to_mixture_record(record, store);
      } catch (const Error& e) {
        throw SchemaError(std::string(task_name(kTasks[i])) + " record " + std::to_string(idx + 1) +
                          ": " + e.what());
      }
      if (converted["task"] != task_name(kTasks[i])) {
        throw SchemaError(std::string(task_name(kTasks[i])) + " record " + std::to_string(idx + 1) +
                          ": record belongs to another task");
      }
      out.push_back(std::move(converted));
    }
  }
  if (config.shuffle) {
    Rng rng(config.seed);
    rng.shuffle(out);
  }
  return out;
}

void emit_mixture(const std::array<std::vector<Json>, kNumTasks>& streams, const CorpusStore& store,
                  const MixtureConfig& config, const std::filesystem::path& out,
                  Diagnostics* diag) {
  write_jsonl(out, build_mixture(streams, store, config, diag));
}

}  // namespace tqforge
