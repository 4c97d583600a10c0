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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/errors.hpp"

namespace kgdelta::sparql {

/// `instance of` and `subclass of`; type constraints walk P31 then P279*.
inline constexpr EntityId kInstanceOf = EntityId::property(31);
inline constexpr EntityId kSubclassOf = EntityId::property(279);

/// Variable name without the leading '?'. Names starting with '_' are
/// reserved for the builder.
struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, EntityId, Literal>;

struct Pattern {
  Term subject;
  EntityId predicate;
  Term object;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class FilterKind {
  /// var is an instance of `target` or of one of its transitive subclasses.
  kTypeConstraint,
  /// (var, predicate, target) holds.
  kAttributeEquals,
  /// (var, predicate, h) and (h, hop_predicate, target) hold for some h.
  kHopExists,
};

struct FilterExpr {
  FilterKind kind = FilterKind::kAttributeEquals;
  std::string var;
  EntityId predicate;      // unused for type constraints
  EntityId hop_predicate;  // hop_exists only
  EntityId target;
  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct PatternBlock {
  std::vector<Pattern> patterns;
  std::vector<FilterExpr> filters;
  friend bool operator==(const PatternBlock&, const PatternBlock&) = default;
};

enum class CountOp { kEqual, kAtLeast };

struct Grouping {
  std::string group_var;
  CountOp op = CountOp::kEqual;
  std::size_t threshold = 1;
  friend bool operator==(const Grouping&, const Grouping&) = default;
};

/// A query of the supported fragment: a UNION of pattern blocks projecting
/// one variable, optionally grouped with HAVING on COUNT, optionally limited.
/// With grouping, an answer's count is the number of distinct blocks it
/// satisfies.
struct QuerySpec {
  std::string select_var;
  std::vector<PatternBlock> blocks;
  std::optional<Grouping> grouping;
  std::optional<std::size_t> limit;
  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedConstruct : public SyntaxError {
 public:
  UnsupportedConstruct(std::size_t line, std::size_t column, std::string construct);
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

/// Checks the structural invariants build_sparql relies on; throws
/// InvalidSpec.
void validate(const QuerySpec& spec);

/// Canonical SPARQL text. A single block is written inline; several blocks
/// are written as braced groups joined by UNION.
std::string build_sparql(const QuerySpec& spec);

/// Parses the fragment emitted by build_sparql (comments and free whitespace
/// allowed). parse_sparql(build_sparql(s)) == s for every valid spec.
QuerySpec parse_sparql(std::string_view text);

/// Variables of a block's patterns in first-appearance order.
std::vector<std::string> block_variables(const PatternBlock& block);

std::string term_to_sparql(const Term& t);

nlohmann::ordered_json block_to_json(const PatternBlock& block);
PatternBlock block_from_json(const nlohmann::json& j);
nlohmann::ordered_json filter_to_json(const FilterExpr& f);
FilterExpr filter_from_json(const nlohmann::json& j);

}  // namespace kgdelta::sparql
