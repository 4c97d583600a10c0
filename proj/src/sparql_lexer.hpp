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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace kgdelta::sparql::detail {

enum class TokenKind {
  kEnd,
  kWord,      // bare identifier or keyword
  kVar,       // ?name, text holds name
  kPrefixed,  // prefix:local, text holds the whole name
  kString,    // text holds the decoded value
  kInteger,
  kLangTag,   // @en, text holds "en"
  kIri,       // <...>
  kPunct,     // { } ( ) . = >= / * ^^ and other single characters
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_punct(std::string_view p) const { return kind == TokenKind::kPunct && text == p; }
  /// Case-insensitive keyword match.
  bool is_word(std::string_view w) const;
};

/// Hand-written scanner; '#' comments run to end of line.
class Lexer {
 public:
  explicit Lexer(std::string_view input) : in_(input) {}

  Token next();
  const Token& peek();
  Token take();

 private:
  void skip_space();
  char cur() const { return pos_ < in_.size() ? in_[pos_] : '\0'; }
  void bump();

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  bool has_peek_ = false;
  Token peeked_;
};

}  // namespace kgdelta::sparql::detail
