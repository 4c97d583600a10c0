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

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kgdelta {

/// Wikidata-style identifier: `Q<digits>` for items, `P<digits>` for
/// properties. Stored as (kind, number) so comparison and hashing are cheap.
class EntityId {
 public:
  enum class Kind : char { kProperty = 'P', kItem = 'Q' };

  constexpr EntityId() = default;
  constexpr EntityId(Kind kind, std::uint64_t number)
      : kind_(kind), number_(number) {}

  static constexpr EntityId item(std::uint64_t n) { return {Kind::kItem, n}; }
  static constexpr EntityId property(std::uint64_t n) {
    return {Kind::kProperty, n};
  }

  /// Throws FormatError unless `text` matches ^[QP][0-9]+$ without leading
  /// zeros.
  static EntityId parse(std::string_view text);
  static std::optional<EntityId> try_parse(std::string_view text);

  constexpr Kind kind() const { return kind_; }
  constexpr std::uint64_t number() const { return number_; }
  constexpr bool is_item() const { return kind_ == Kind::kItem; }
  constexpr bool is_property() const { return kind_ == Kind::kProperty; }
  constexpr bool valid() const { return number_ != 0; }

  std::string str() const;

  friend constexpr auto operator<=>(const EntityId&, const EntityId&) = default;

 private:
  Kind kind_ = Kind::kItem;
  std::uint64_t number_ = 0;
};

enum class LiteralType : std::uint8_t {
  kString,
  kQuantity,
  kTime,
  kCoordinate,
  kMonolingual,
  /// A datatype the ingester does not model; value holds the raw JSON.
  kOpaque,
};

std::string_view to_string(LiteralType t);
std::optional<LiteralType> literal_type_from_string(std::string_view s);

struct Literal {
  std::string value;
  LiteralType type = LiteralType::kString;

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Object position of a triple: an entity or a literal. Entities order before
/// literals.
class ObjectValue {
 public:
  ObjectValue() = default;
  ObjectValue(EntityId id) : value_(id) {}  // NOLINT(google-explicit-constructor)
  ObjectValue(Literal lit) : value_(std::move(lit)) {}  // NOLINT

  bool is_entity() const { return value_.index() == 0; }
  bool is_literal() const { return value_.index() == 1; }
  EntityId entity() const { return std::get<EntityId>(value_); }
  const Literal& literal() const { return std::get<Literal>(value_); }
  const EntityId* entity_if() const { return std::get_if<EntityId>(&value_); }

  /// Entity id text, or the literal value.
  std::string display() const;

  friend auto operator<=>(const ObjectValue&, const ObjectValue&) = default;
  friend bool operator==(const ObjectValue&, const ObjectValue&) = default;

 private:
  std::variant<EntityId, Literal> value_;
};

enum class Rank : std::uint8_t { kPreferred, kNormal, kDeprecated };

std::string_view to_string(Rank r);
std::optional<Rank> rank_from_string(std::string_view s);

/// One subject-predicate-object statement.
struct Triple {
  EntityId subject;
  EntityId predicate;
  ObjectValue object;
  std::optional<std::string> statement_id;
  Rank rank = Rank::kNormal;
  /// Qualifiers as compact JSON; opaque to everything but the ambiguity
  /// filter.
  std::string qualifiers;

  bool same_content(const Triple& o) const {
    return subject == o.subject && predicate == o.predicate &&
           object == o.object;
  }

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Canonical order: subject, predicate, object, statement id, rank,
/// qualifiers.
struct CanonicalLess {
  bool operator()(const Triple& a, const Triple& b) const;
};

struct LabelRecord {
  EntityId entity;
  std::string label;
  std::vector<std::string> aliases;
  std::string language;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

}  // namespace kgdelta

template <>
struct std::hash<kgdelta::EntityId> {
  std::size_t operator()(const kgdelta::EntityId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.number() * 2 +
                                      (id.is_item() ? 1 : 0));
  }
};

template <>
struct std::hash<kgdelta::ObjectValue> {
  std::size_t operator()(const kgdelta::ObjectValue& v) const noexcept {
    if (v.is_entity()) return std::hash<kgdelta::EntityId>{}(v.entity());
    const auto& lit = v.literal();
    return std::hash<std::string>{}(lit.value) ^
           (static_cast<std::size_t>(lit.type) * 0x9e3779b97f4a7c15ULL);
  }
};
