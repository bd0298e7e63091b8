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
#include "tqforge/jsonl.h"

#include <algorithm>

#include "tqforge/error.h"

namespace tqforge {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const Json&)>& fn,
                    const std::function<void(std::size_t, const std::string&)>& on_error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::parse_error& e) {
      if (on_error) {
        on_error(line_no, e.what());
        continue;
      }
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(line_no, value);
  }
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::vector<Json> out;
  for_each_jsonl(path, [&](std::size_t, const Json& v) { out.push_back(v); });
  return out;
}

std::string dump_line(const Json& value) { return value.dump(); }

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot write " + path.string());
}

void JsonlWriter::write(const Json& value) {
  out_ << value.dump() << '\n';
  ++count_;
}

void JsonlWriter::close() {
  out_.close();
  if (!out_) throw IoError("failed writing " + path_.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& values) {
  JsonlWriter w(path);
  for (const Json& v : values) w.write(v);
  w.close();
}

const Json& require(const Json& obj, std::string_view key) {
  if (!obj.is_object()) throw SchemaError("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing field '" + std::string(key) + "'");
  return *it;
}

std::string require_string(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw SchemaError("field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> require_string_array(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_array()) throw SchemaError("field '" + std::string(key) + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    if (!e.is_string()) {
      throw SchemaError("field '" + std::string(key) + "' must contain only strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

long long require_int(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_number_integer()) throw SchemaError("field '" + std::string(key) + "' must be an integer");
  return v.get<long long>();
}

double require_number(const Json& obj, std::string_view key) {
  const Json& v = require(obj, key);
  if (!v.is_number()) throw SchemaError("field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw SchemaError("unexpected field '" + it.key() + "'");
    }
  }
}

}  // namespace tqforge
