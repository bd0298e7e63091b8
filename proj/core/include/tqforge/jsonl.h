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
#ifndef TQFORGE_JSONL_H_
#define TQFORGE_JSONL_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tqforge {

using Json = nlohmann::json;

// Visits every non-blank line. Unparseable lines go to on_error when set;
// otherwise they raise SchemaError naming the line. Line numbers are 1-based.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t line_no, const Json&)>& fn,
                    const std::function<void(std::size_t line_no, const std::string&)>& on_error = {});

std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Compact single-line JSON; object keys are emitted in sorted order.
std::string dump_line(const Json& value);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const Json& value);
  std::size_t count() const { return count_; }
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& values);

// Field accessors that raise SchemaError with the field name.
const Json& require(const Json& obj, std::string_view key);
std::string require_string(const Json& obj, std::string_view key);
std::vector<std::string> require_string_array(const Json& obj, std::string_view key);
long long require_int(const Json& obj, std::string_view key);
double require_number(const Json& obj, std::string_view key);
// Rejects keys outside allowed.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed);

}  // namespace tqforge

#endif  // TQFORGE_JSONL_H_
