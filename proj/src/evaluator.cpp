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

#include "kgdelta/evaluator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_set>

namespace kgdelta {
namespace {

using sparql::FilterExpr;
using sparql::FilterKind;
using sparql::PatternBlock;
using sparql::QuerySpec;
using sparql::Term;
using sparql::Variable;

constexpr std::size_t kSaturation = 2;

bool live(const Triple& t, const EvalOptions& options) {
  return !(options.exclude_deprecated && t.rank == Rank::kDeprecated);
}

// Backtracking join over the patterns of one block. At each step the pattern
// with the most bound positions is expanded next.
class BlockSearch {
 public:
  using Visitor = std::function<bool(const std::vector<std::optional<ObjectValue>>&)>;

  BlockSearch(const PatternBlock& block, const TripleStore& store, const EvalOptions& options)
      : block_(block), store_(store), options_(options) {
    for (const auto& p : block.patterns) {
      patterns_.push_back({slot(p.subject), p.predicate, slot(p.object)});
    }
    values_.resize(names_.size());
    done_.assign(patterns_.size(), false);
    for (const auto& f : block.filters) filter_vars_.push_back(index_of(f.var));
  }

  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  /// Pre-binds a variable; returns false if a filter on it already fails.
  bool preset(int var, const ObjectValue& value) {
    values_[var] = value;
    return filters_pass(var);
  }

  /// Calls visit for every solution until it returns false. Returns false if
  /// stopped early.
  bool run(const Visitor& visit) { return step(visit); }

 private:
  struct Slot {
    int var = -1;  // -1 for constants
    ObjectValue constant;
  };
  struct CompiledPattern {
    Slot s;
    EntityId p;
    Slot o;
  };

  Slot slot(const Term& t) {
    Slot s;
    if (auto v = std::get_if<Variable>(&t)) {
      int idx = index_of(v->name);
      if (idx < 0) {
        idx = static_cast<int>(names_.size());
        names_.push_back(v->name);
      }
      s.var = idx;
    } else if (auto e = std::get_if<EntityId>(&t)) {
      s.constant = *e;
    } else {
      s.constant = std::get<Literal>(t);
    }
    return s;
  }

  const ObjectValue* resolve(const Slot& s) const {
    if (s.var < 0) return &s.constant;
    return values_[s.var] ? &*values_[s.var] : nullptr;
  }

  bool filters_pass(int var) const {
    for (std::size_t i = 0; i < filter_vars_.size(); ++i) {
      if (filter_vars_[i] == var &&
          !filter_holds(block_.filters[i], *values_[var], store_, options_)) {
        return false;
      }
    }
    return true;
  }

  std::size_t pick() const {
    std::size_t best = patterns_.size();
    int best_score = -1;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (done_[i]) continue;
      const int score = (resolve(patterns_[i].s) ? 2 : 0) + (resolve(patterns_[i].o) ? 1 : 0);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  bool step(const Visitor& visit) {
    const std::size_t i = pick();
    if (i == patterns_.size()) return visit(values_);
    const CompiledPattern& cp = patterns_[i];
    const ObjectValue* s = resolve(cp.s);
    const ObjectValue* o = resolve(cp.o);

    auto attempt = [&](const Triple& t) -> bool {
      if (!live(t, options_)) return true;
      if (o && t.object != *o) return true;
      int bound[2];
      int n = 0;
      if (!s) {
        values_[cp.s.var] = ObjectValue(t.subject);
        bound[n++] = cp.s.var;
      }
      bool ok = true;
      if (!o) {
        if (values_[cp.o.var]) {
          ok = *values_[cp.o.var] == t.object;  // subject and object share a variable
        } else {
          values_[cp.o.var] = t.object;
          bound[n++] = cp.o.var;
        }
      }
      for (int k = 0; ok && k < n; ++k) ok = filters_pass(bound[k]);
      bool keep_going = true;
      if (ok) {
        done_[i] = true;
        keep_going = step(visit);
        done_[i] = false;
      }
      for (int k = 0; k < n; ++k) values_[bound[k]].reset();
      return keep_going;
    };

    if (s) {
      const EntityId* subject = s->entity_if();
      if (!subject) return true;
      for (const Triple& t : store_.group(*subject, cp.p)) {
        if (!attempt(t)) return false;
      }
    } else if (o) {
      for (std::uint32_t idx : store_.by_object(*o, cp.p)) {
        if (!attempt(store_.at(idx))) return false;
      }
    } else {
      for (std::uint32_t idx : store_.by_predicate(cp.p)) {
        if (!attempt(store_.at(idx))) return false;
      }
    }
    return true;
  }

  const PatternBlock& block_;
  const TripleStore& store_;
  const EvalOptions& options_;
  std::vector<std::string> names_;
  std::vector<CompiledPattern> patterns_;
  std::vector<int> filter_vars_;
  std::vector<std::optional<ObjectValue>> values_;
  std::vector<bool> done_;
};

void check_filter_targets(const QuerySpec& spec, const TripleStore& store) {
  for (const auto& block : spec.blocks) {
    for (const auto& f : block.filters) {
      if (!store.mentions(f.target)) {
        throw EvaluationError("filter refers to unknown entity " + f.target.str());
      }
    }
  }
}

// Collects distinct answers of a block, stopping once `cap` are found
// (0 means no cap).
std::vector<ObjectValue> collect(const PatternBlock& block, std::string_view var,
                                 const TripleStore& store, const EvalOptions& options,
                                 std::set<ObjectValue>& seen, std::size_t cap) {
  BlockSearch search(block, store, options);
  const int idx = search.index_of(var);
  if (idx < 0) throw EvaluationError("variable ?" + std::string(var) + " not bound by block");
  search.run([&](const std::vector<std::optional<ObjectValue>>& values) {
    seen.insert(*values[idx]);
    return cap == 0 || seen.size() < cap;
  });
  return {seen.begin(), seen.end()};
}

bool is_intersection(const QuerySpec& spec) {
  return spec.grouping && spec.grouping->threshold == spec.blocks.size() &&
         spec.blocks.size() > 1;
}

}  // namespace

bool has_type(EntityId entity, EntityId cls, const TripleStore& store,
              const EvalOptions& options) {
  std::unordered_set<EntityId> visited;
  std::deque<EntityId> frontier;
  for (const Triple& t : store.group(entity, sparql::kInstanceOf)) {
    if (!live(t, options)) continue;
    if (auto c = t.object.entity_if(); c && visited.insert(*c).second) frontier.push_back(*c);
  }
  while (!frontier.empty()) {
    const EntityId c = frontier.front();
    frontier.pop_front();
    if (c == cls) return true;
    for (const Triple& t : store.group(c, sparql::kSubclassOf)) {
      if (!live(t, options)) continue;
      if (auto p = t.object.entity_if(); p && visited.insert(*p).second) frontier.push_back(*p);
    }
  }
  return false;
}

bool filter_holds(const FilterExpr& filter, const ObjectValue& value, const TripleStore& store,
                  const EvalOptions& options) {
  const EntityId* e = value.entity_if();
  if (!e) return false;
  switch (filter.kind) {
    case FilterKind::kTypeConstraint:
      return has_type(*e, filter.target, store, options);
    case FilterKind::kAttributeEquals:
      return store.contains(*e, filter.predicate, filter.target, !options.exclude_deprecated);
    case FilterKind::kHopExists:
      for (const Triple& t : store.group(*e, filter.predicate)) {
        if (!live(t, options)) continue;
        const EntityId* h = t.object.entity_if();
        if (h && store.contains(*h, filter.hop_predicate, filter.target,
                                !options.exclude_deprecated)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

std::vector<ObjectValue> block_answers(const PatternBlock& block, std::string_view var,
                                       const TripleStore& store, const EvalOptions& options) {
  std::set<ObjectValue> seen;
  return collect(block, var, store, options, seen, 0);
}

bool block_satisfied_by(const PatternBlock& block, std::string_view var,
                        const ObjectValue& value, const TripleStore& store,
                        const EvalOptions& options) {
  BlockSearch search(block, store, options);
  const int idx = search.index_of(var);
  if (idx < 0) throw EvaluationError("variable ?" + std::string(var) + " not bound by block");
  if (!search.preset(idx, value)) return false;
  bool found = false;
  search.run([&](const auto&) {
    found = true;
    return false;
  });
  return found;
}

std::vector<ObjectValue> combine_blocks(const std::optional<sparql::Grouping>& grouping,
                                        const std::vector<std::vector<ObjectValue>>& per_block) {
  if (!grouping) {
    std::set<ObjectValue> all;
    for (const auto& answers : per_block) all.insert(answers.begin(), answers.end());
    return {all.begin(), all.end()};
  }
  std::map<ObjectValue, std::size_t> counts;
  for (const auto& answers : per_block) {
    for (const auto& a : answers) ++counts[a];
  }
  std::vector<ObjectValue> out;
  for (const auto& [value, n] : counts) {
    const bool keep = grouping->op == sparql::CountOp::kEqual ? n == grouping->threshold
                                                              : n >= grouping->threshold;
    if (keep) out.push_back(value);
  }
  return out;
}

ResultSet evaluate(const QuerySpec& spec, const TripleStore& store, const EvalOptions& options) {
  sparql::validate(spec);
  check_filter_targets(spec, store);
  std::vector<std::vector<ObjectValue>> per_block;
  per_block.reserve(spec.blocks.size());
  for (const auto& block : spec.blocks) {
    per_block.push_back(block_answers(block, spec.select_var, store, options));
  }
  ResultSet result;
  result.bindings = combine_blocks(spec.grouping, per_block);
  if (spec.limit && result.bindings.size() > *spec.limit) {
    result.truncated = true;
    result.bindings.resize(*spec.limit);
  }
  return result;
}

std::size_t count_answers(const QuerySpec& spec, const TripleStore& store,
                          const EvalOptions& options) {
  sparql::validate(spec);
  check_filter_targets(spec, store);
  if (!spec.grouping) {
    std::set<ObjectValue> seen;
    for (const auto& block : spec.blocks) {
      collect(block, spec.select_var, store, options, seen, kSaturation);
      if (seen.size() >= kSaturation) return kSaturation;
    }
    return seen.size();
  }
  if (is_intersection(spec)) {
    // With the threshold at the block count, = and >= both mean "in every
    // block": check candidates of the first block against the rest.
    // Candidates come from the first block without filters, which is
    // usually anchored and cheap to enumerate.
    std::size_t source = 0;
    for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
      if (spec.blocks[b].filters.empty()) {
        source = b;
        break;
      }
    }
    std::size_t n = 0;
    for (const auto& candidate : block_answers(spec.blocks[source], spec.select_var, store,
                                               options)) {
      bool all = true;
      for (std::size_t b = 0; all && b < spec.blocks.size(); ++b) {
        if (b == source) continue;
        all = block_satisfied_by(spec.blocks[b], spec.select_var, candidate, store, options);
      }
      if (all && ++n >= kSaturation) return kSaturation;
    }
    return n;
  }
  std::vector<std::vector<ObjectValue>> per_block;
  for (const auto& block : spec.blocks) {
    per_block.push_back(block_answers(block, spec.select_var, store, options));
  }
  return std::min(combine_blocks(spec.grouping, per_block).size(), kSaturation);
}

}  // namespace kgdelta
