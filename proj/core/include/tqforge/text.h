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
#ifndef TQFORGE_TEXT_H_
#define TQFORGE_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tqforge {

// A token is a maximal run of word characters or a single punctuation
// character. Offsets are byte offsets into the tokenized text.
struct Token {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_word = false;

  bool operator==(const Token&) const = default;
};

// Splits on Unicode whitespace; ASCII alphanumerics and non-punctuation
// code points above U+007F form words; every punctuation code point is
// its own token.
std::vector<Token> tokenize(std::string_view text);

// Lowercased word tokens only.
std::vector<std::string> word_terms(std::string_view text);

std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s);
bool has_alnum(std::string_view s);

// Number of UTF-8 code points; malformed bytes count as one each.
std::size_t utf8_length(std::string_view s);

// Decodes the code point at byte offset i and stores its byte length.
char32_t decode_utf8(std::string_view s, std::size_t i, std::size_t* length);

bool is_unicode_space(char32_t cp);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace tqforge

#endif  // TQFORGE_TEXT_H_
