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
#include "tqforge/text.h"

#include <cctype>
#include <cstdio>

namespace tqforge {
namespace {

bool is_unicode_punct(char32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<unsigned char>(cp)) != 0;
  }
  return (cp >= 0x00A1 && cp <= 0x00BF) ||  // Latin-1 punctuation and currency
         cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2010 && cp <= 0x2027) ||  // dashes, quotes, bullets
         (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x20A0 && cp <= 0x20CF) ||  // currency symbols
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0xFF01 && cp <= 0xFF0F);
}

}  // namespace

char32_t decode_utf8(std::string_view s, std::size_t i, std::size_t* length) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    *length = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    int c1 = cont(1);
    if (c1 >= 0) {
      *length = 2;
      return (static_cast<char32_t>(b0 & 0x1F) << 6) | static_cast<char32_t>(c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      *length = 3;
      return (static_cast<char32_t>(b0 & 0x0F) << 12) | (static_cast<char32_t>(c1) << 6) |
             static_cast<char32_t>(c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      *length = 4;
      return (static_cast<char32_t>(b0 & 0x07) << 18) | (static_cast<char32_t>(c1) << 12) |
             (static_cast<char32_t>(c2) << 6) | static_cast<char32_t>(c3);
    }
  }
  *length = 1;
  return 0xFFFD;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t word_start = std::string_view::npos;
  auto flush_word = [&](std::size_t end) {
    if (word_start != std::string_view::npos) {
      tokens.push_back({std::string(text.substr(word_start, end - word_start)), word_start, end, true});
      word_start = std::string_view::npos;
    }
  };
  while (i < text.size()) {
    std::size_t len = 1;
    const char32_t cp = decode_utf8(text, i, &len);
    if (is_unicode_space(cp)) {
      flush_word(i);
    } else if (is_unicode_punct(cp)) {
      flush_word(i);
      tokens.push_back({std::string(text.substr(i, len)), i, i + len, false});
    } else if (word_start == std::string_view::npos) {
      word_start = i;
    }
    i += len;
  }
  flush_word(text.size());
  return tokens;
}

std::vector<std::string> word_terms(std::string_view text) {
  std::vector<std::string> terms;
  for (const Token& t : tokenize(text)) {
    if (t.is_word) terms.push_back(ascii_lower(t.surface));
  }
  return terms;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e) {
    std::size_t len = 1;
    if (!is_unicode_space(decode_utf8(s, b, &len))) break;
    b += len;
  }
  while (e > b) {
    // Step back to the start of the previous code point.
    std::size_t p = e - 1;
    while (p > b && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) --p;
    std::size_t len = 1;
    if (!is_unicode_space(decode_utf8(s, p, &len)) || p + len != e) break;
    e = p;
  }
  return s.substr(b, e - b);
}

bool has_alnum(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    const char32_t cp = decode_utf8(s, i, &len);
    if (cp < 0x80 ? std::isalnum(static_cast<unsigned char>(cp)) != 0
                  : (!is_unicode_space(cp) && !is_unicode_punct(cp) && cp != 0xFFFD)) {
      return true;
    }
    i += len;
  }
  return false;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++n) {
    std::size_t len = 1;
    decode_utf8(s, i, &len);
    i += len;
  }
  return n;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace tqforge
