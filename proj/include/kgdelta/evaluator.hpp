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
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgdelta/errors.hpp"
#include "kgdelta/sparql.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

class EvaluationError : public Error {
 public:
  using Error::Error;
};

struct EvalOptions {
  /// Deprecated statements never match patterns or filters.
  bool exclude_deprecated = true;
};

struct ResultSet {
  /// Distinct values of the selected variable in canonical order, cut to the
  /// query LIMIT.
  std::vector<ObjectValue> bindings;
  /// True when more answers existed than the LIMIT allowed.
  bool truncated = false;
};

/// Evaluates a query of the supported fragment against a snapshot.
/// Throws EvaluationError when a filter names an entity the store never
/// mentions.
ResultSet evaluate(const sparql::QuerySpec& spec, const TripleStore& store,
                   const EvalOptions& options = {});

/// Number of answers ignoring LIMIT, saturated at 2: callers only need to
/// tell zero, exactly one and several apart.
std::size_t count_answers(const sparql::QuerySpec& spec, const TripleStore& store,
                          const EvalOptions& options = {});

/// Distinct values of `var` over all solutions of one block, sorted.
std::vector<ObjectValue> block_answers(const sparql::PatternBlock& block, std::string_view var,
                                       const TripleStore& store,
                                       const EvalOptions& options = {});

/// True if the block has a solution with `var` bound to `value`.
bool block_satisfied_by(const sparql::PatternBlock& block, std::string_view var,
                        const ObjectValue& value, const TripleStore& store,
                        const EvalOptions& options = {});

/// Applies the grouping rule to per-block answer sets (each sorted and
/// unique). Without grouping the result is the union.
std::vector<ObjectValue> combine_blocks(const std::optional<sparql::Grouping>& grouping,
                                        const std::vector<std::vector<ObjectValue>>& per_block);

/// `entity` reaches `cls` through one P31 edge followed by any number of
/// P279 edges.
bool has_type(EntityId entity, EntityId cls, const TripleStore& store,
              const EvalOptions& options = {});

bool filter_holds(const sparql::FilterExpr& filter, const ObjectValue& value,
                  const TripleStore& store, const EvalOptions& options = {});

}  // namespace kgdelta
