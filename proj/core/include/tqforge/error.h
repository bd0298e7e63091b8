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

#ifndef TQFORGE_ERROR_H_
#define TQFORGE_ERROR_H_

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tqforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A table or record violates a structural invariant.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A line-delimited record does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Out-of-grammar SQL text. position is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A query that parsed but cannot be evaluated against a given table.
class ExecutionError : public Error {
 public:
  using Error::Error;
};

// Non-fatal findings collected while processing a batch: skipped records,
// dangling links, partial outputs. Callers decide where to print them.
class Diagnostics {
 public:
  void warn(std::string message) { messages_.push_back(std::move(message)); }
  void count(const std::string& key, std::size_t n = 1) { counters_[key] += n; }

  std::size_t counter(const std::string& key) const {
    auto it = counters_.find(key);
    return it == counters_.end() ? 0 : it->second;
  }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::map<std::string, std::size_t>& counters() const { return counters_; }
  bool empty() const { return messages_.empty() && counters_.empty(); }

  void merge(const Diagnostics& other) {
    messages_.insert(messages_.end(), other.messages_.begin(), other.messages_.end());
    for (const auto& [k, v] : other.counters_) counters_[k] += v;
  }

 private:
  std::vector<std::string> messages_;
  std::map<std::string, std::size_t> counters_;
};

}  // namespace tqforge

#endif  // TQFORGE_ERROR_H_
