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

#include "kgdelta/entity.hpp"

#include <tuple>

#include "kgdelta/errors.hpp"

namespace kgdelta {

std::optional<EntityId> EntityId::try_parse(std::string_view text) {
  if (text.size() < 2 || text.size() > 20) return std::nullopt;
  Kind kind;
  if (text[0] == 'Q') {
    kind = Kind::kItem;
  } else if (text[0] == 'P') {
    kind = Kind::kProperty;
  } else {
    return std::nullopt;
  }
  if (text[1] == '0') return std::nullopt;
  std::uint64_t n = 0;
  for (size_t i = 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return std::nullopt;
    const std::uint64_t next = n * 10 + static_cast<std::uint64_t>(c - '0');
    if (next / 10 != n) return std::nullopt;
    n = next;
  }
  return EntityId(kind, n);
}

EntityId EntityId::parse(std::string_view text) {
  auto id = try_parse(text);
  if (!id) throw FormatError("invalid entity id: '" + std::string(text) + "'");
  return *id;
}

std::string EntityId::str() const {
  return static_cast<char>(kind_) + std::to_string(number_);
}

std::string_view to_string(LiteralType t) {
  switch (t) {
    case LiteralType::kString: return "string";
    case LiteralType::kQuantity: return "quantity";
    case LiteralType::kTime: return "time";
    case LiteralType::kCoordinate: return "coordinate";
    case LiteralType::kMonolingual: return "monolingual";
    case LiteralType::kOpaque: return "opaque";
  }
  return "string";
}

std::optional<LiteralType> literal_type_from_string(std::string_view s) {
  if (s == "string") return LiteralType::kString;
  if (s == "quantity") return LiteralType::kQuantity;
  if (s == "time") return LiteralType::kTime;
  if (s == "coordinate") return LiteralType::kCoordinate;
  if (s == "monolingual") return LiteralType::kMonolingual;
  if (s == "opaque") return LiteralType::kOpaque;
  return std::nullopt;
}

std::string ObjectValue::display() const {
  return is_entity() ? entity().str() : literal().value;
}

std::string_view to_string(Rank r) {
  switch (r) {
    case Rank::kPreferred: return "preferred";
    case Rank::kNormal: return "normal";
    case Rank::kDeprecated: return "deprecated";
  }
  return "normal";
}

std::optional<Rank> rank_from_string(std::string_view s) {
  if (s == "preferred") return Rank::kPreferred;
  if (s == "normal") return Rank::kNormal;
  if (s == "deprecated") return Rank::kDeprecated;
  return std::nullopt;
}

bool CanonicalLess::operator()(const Triple& a, const Triple& b) const {
  return std::tie(a.subject, a.predicate, a.object, a.statement_id, a.rank,
                  a.qualifiers) < std::tie(b.subject, b.predicate, b.object,
                                           b.statement_id, b.rank,
                                           b.qualifiers);
}

}  // namespace kgdelta
