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

#include "sparql_lexer.hpp"

#include <cctype>

#include "kgdelta/sparql.hpp"

namespace kgdelta::sparql::detail {
namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

}  // namespace

bool Token::is_word(std::string_view w) const {
  if (kind != TokenKind::kWord || text.size() != w.size()) return false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(text[i])) !=
        std::toupper(static_cast<unsigned char>(w[i]))) {
      return false;
    }
  }
  return true;
}

void Lexer::bump() {
  if (cur() == '\n') {
    ++line_;
    col_ = 1;
  } else if ((static_cast<unsigned char>(cur()) & 0xC0) != 0x80) {
    ++col_;  // count code points, not continuation bytes
  }
  ++pos_;
}

void Lexer::skip_space() {
  for (;;) {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(cur()))) bump();
    if (cur() == '#') {
      while (pos_ < in_.size() && cur() != '\n') bump();
      continue;
    }
    return;
  }
}

const Token& Lexer::peek() {
  if (!has_peek_) {
    peeked_ = next();
    has_peek_ = true;
  }
  return peeked_;
}

Token Lexer::take() {
  if (has_peek_) {
    has_peek_ = false;
    return std::move(peeked_);
  }
  return next();
}

Token Lexer::next() {
  skip_space();
  Token t;
  t.line = line_;
  t.column = col_;
  if (pos_ >= in_.size()) return t;

  const char c = cur();
  if (c == '?' || c == '$') {
    bump();
    t.kind = TokenKind::kVar;
    while (is_name_char(cur()) && cur() != '-') {
      t.text.push_back(cur());
      bump();
    }
    if (t.text.empty()) throw SyntaxError(t.line, t.column, "empty variable name");
    return t;
  }
  if (c == '"' || c == '\'') {
    const char quote = c;
    bump();
    t.kind = TokenKind::kString;
    for (;;) {
      if (pos_ >= in_.size() || cur() == '\n') {
        throw SyntaxError(t.line, t.column, "unterminated string literal");
      }
      if (cur() == quote) {
        bump();
        break;
      }
      if (cur() == '\\') {
        bump();
        switch (cur()) {
          case 'n': t.text.push_back('\n'); break;
          case 't': t.text.push_back('\t'); break;
          case 'r': t.text.push_back('\r'); break;
          case 'b': t.text.push_back('\b'); break;
          case 'f': t.text.push_back('\f'); break;
          case '"': t.text.push_back('"'); break;
          case '\'': t.text.push_back('\''); break;
          case '\\': t.text.push_back('\\'); break;
          default:
            throw SyntaxError(line_, col_, "unknown escape sequence in string");
        }
        bump();
        continue;
      }
      t.text.push_back(cur());
      bump();
    }
    return t;
  }
  if (c == '@') {
    bump();
    t.kind = TokenKind::kLangTag;
    while (is_name_char(cur())) {
      t.text.push_back(cur());
      bump();
    }
    return t;
  }
  if (c == '<') {
    // Either an IRI or a comparison; IRIs contain no whitespace.
    std::size_t end = pos_ + 1;
    while (end < in_.size() && in_[end] != '>' && !std::isspace(static_cast<unsigned char>(in_[end]))) {
      ++end;
    }
    if (end < in_.size() && in_[end] == '>' && end > pos_ + 1) {
      t.kind = TokenKind::kIri;
      while (pos_ <= end) {
        t.text.push_back(cur());
        bump();
      }
      return t;
    }
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    t.kind = TokenKind::kInteger;
    while (std::isdigit(static_cast<unsigned char>(cur()))) {
      t.text.push_back(cur());
      bump();
    }
    return t;
  }
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    while (is_name_char(cur())) {
      t.text.push_back(cur());
      bump();
    }
    if (cur() == ':') {
      t.kind = TokenKind::kPrefixed;
      t.text.push_back(':');
      bump();
      while (is_name_char(cur())) {
        t.text.push_back(cur());
        bump();
      }
    } else {
      t.kind = TokenKind::kWord;
    }
    return t;
  }
  t.kind = TokenKind::kPunct;
  if ((c == '>' || c == '<' || c == '!') && pos_ + 1 < in_.size() && in_[pos_ + 1] == '=') {
    t.text = std::string{c, '='};
    bump();
    bump();
    return t;
  }
  if (c == '^' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '^') {
    t.text = "^^";
    bump();
    bump();
    return t;
  }
  t.text = std::string(1, c);
  bump();
  return t;
}

}  // namespace kgdelta::sparql::detail
