// Copyright 2026 The kgdelta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgdelta/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdio>

#include "kgdelta/errors.hpp"

namespace kgdelta::text {
namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error("ICU NFC normalizer unavailable");
  }
  return *n;
}

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

// Decodes the code point starting at byte offset `i`; U+FFFD on bad input.
UChar32 decode_at(std::string_view s, int32_t& i) {
  UChar32 c;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), i,
          static_cast<int32_t>(s.size()), c);
  return c < 0 ? 0xFFFD : c;
}

bool is_space_cp(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_fold_to_space(UChar32 c) {
  return u_ispunct(c) != 0 || u_hasBinaryProperty(c, UCHAR_WHITE_SPACE) ||
         (U_GET_GC_MASK(c) & U_GC_S_MASK) != 0;
}

}  // namespace

std::string nfc(std::string_view s) {
  if (is_ascii(s)) return std::string(s);
  const auto& norm = nfc_instance();
  auto u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  UErrorCode status = U_ZERO_ERROR;
  if (norm.isNormalized(u, status) && U_SUCCESS(status)) return to_utf8(u);
  status = U_ZERO_ERROR;
  icu::UnicodeString out = norm.normalize(u, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return to_utf8(out);
}

std::string lower_nfc(std::string_view s) {
  if (is_ascii(s)) {
    std::string out(s);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  auto u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  return nfc(to_utf8(u));
}

std::string_view trim(std::string_view s) {
  int32_t begin = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (begin < n) {
    int32_t next = begin;
    if (!is_space_cp(decode_at(s, next))) break;
    begin = next;
  }
  int32_t end = n;
  while (end > begin) {
    int32_t prev = end;
    UChar32 c;
    U8_PREV(reinterpret_cast<const uint8_t*>(s.data()), begin, prev, c);
    if (c < 0 || !is_space_cp(c)) break;
    end = prev;
  }
  return s.substr(static_cast<size_t>(begin), static_cast<size_t>(end - begin));
}

std::string normalize_literal(std::string_view s) { return nfc(trim(s)); }

std::string surface_key(std::string_view s) {
  const std::string lowered = lower_nfc(s);
  std::string out;
  out.reserve(lowered.size());
  bool pending_space = false;
  int32_t i = 0;
  const auto n = static_cast<int32_t>(lowered.size());
  while (i < n) {
    const int32_t start = i;
    const UChar32 c = decode_at(lowered, i);
    if (is_fold_to_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(lowered, static_cast<size_t>(start),
               static_cast<size_t>(i - start));
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    const int32_t start = i;
    const UChar32 c = decode_at(s, i);
    if (is_space_cp(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.append(s.substr(static_cast<size_t>(start),
                          static_cast<size_t>(i - start)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool starts_with_punct(std::string_view s) {
  if (s.empty()) return false;
  int32_t i = 0;
  return u_ispunct(decode_at(s, i)) != 0;
}

bool ends_with_punct(std::string_view s) {
  if (s.empty()) return false;
  int32_t end = static_cast<int32_t>(s.size());
  UChar32 c;
  U8_PREV(reinterpret_cast<const uint8_t*>(s.data()), 0, end, c);
  return c >= 0 && u_ispunct(c) != 0;
}

std::string_view strip_punct(std::string_view s) {
  const auto* data = reinterpret_cast<const uint8_t*>(s.data());
  int32_t begin = 0;
  int32_t end = static_cast<int32_t>(s.size());
  while (begin < end) {
    int32_t next = begin;
    UChar32 c;
    U8_NEXT(data, next, end, c);
    if (c < 0 || !u_ispunct(c)) break;
    begin = next;
  }
  while (end > begin) {
    int32_t prev = end;
    UChar32 c;
    U8_PREV(data, begin, prev, c);
    if (c < 0 || !u_ispunct(c)) break;
    end = prev;
  }
  return s.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
}

void append_json_escaped(std::string& out, std::string_view s) {
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
}

}  // namespace kgdelta::text
