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

#include "kgdelta/synth.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include "kgdelta/candidate_filter.hpp"
#include "kgdelta/evaluator.hpp"

namespace kgdelta {
namespace {

using sparql::FilterExpr;
using sparql::FilterKind;
using sparql::Pattern;
using sparql::PatternBlock;
using sparql::QuerySpec;
using sparql::Variable;

using ValueSet = std::vector<ObjectValue>;  // sorted, unique

constexpr const char* kTargetVar = "x";
constexpr const char* kL1Var = "b";

struct TimeCapHit {};

void check_deadline(const SynthContext& ctx) {
  if (ctx.deadline && std::chrono::steady_clock::now() > *ctx.deadline) throw TimeCapHit{};
}

bool live(const Triple& t) { return t.rank != Rank::kDeprecated; }

void normalize(ValueSet& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

ValueSet intersect(const ValueSet& a, const ValueSet& b) {
  ValueSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t intersection_size(const ValueSet& a, const ValueSet& b) {
  const ValueSet& small = a.size() <= b.size() ? a : b;
  const ValueSet& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto& v : small) n += std::binary_search(large.begin(), large.end(), v) ? 1 : 0;
  return n;
}

// One single-edge constraint on the target: (?x p anchor) when outgoing,
// (anchor p ?x) otherwise.
struct Edge {
  EntityId predicate;
  EntityId anchor;
  bool outgoing = true;

  auto key() const { return std::tuple(predicate, anchor, !outgoing); }
  friend bool operator==(const Edge& a, const Edge& b) { return a.key() == b.key(); }
};

PatternBlock edge_block(const Edge& e) {
  const Variable x{kTargetVar};
  PatternBlock b;
  if (e.outgoing) {
    b.patterns.push_back(Pattern{x, e.predicate, e.anchor});
  } else {
    b.patterns.push_back(Pattern{e.anchor, e.predicate, x});
  }
  return b;
}

// Values v with (v, p, anchor) live.
ValueSet subjects_of(const TripleStore& g, EntityId p, EntityId anchor) {
  ValueSet out;
  for (std::uint32_t idx : g.by_object(anchor, p)) {
    const Triple& t = g.at(idx);
    if (live(t)) out.emplace_back(t.subject);
  }
  normalize(out);
  return out;
}

// Values v with (anchor, p, v) live.
ValueSet objects_of(const TripleStore& g, EntityId anchor, EntityId p) {
  ValueSet out;
  for (const Triple& t : g.group(anchor, p)) {
    if (live(t)) out.push_back(t.object);
  }
  normalize(out);
  return out;
}

ValueSet edge_set(const TripleStore& g, const Edge& e) {
  return e.outgoing ? subjects_of(g, e.predicate, e.anchor) : objects_of(g, e.anchor, e.predicate);
}

struct Candidate {
  Edge edge;
  ValueSet set;
};

// Attribute edges of the target usable as constraints.
std::vector<Candidate> candidate_edges(EntityId target, const Edge& seed_edge,
                                       const SynthContext& ctx) {
  const auto& cfg = ctx.config;
  std::set<EntityId> allowed(cfg.constraint_predicates.begin(), cfg.constraint_predicates.end());
  allowed.insert(seed_edge.predicate);
  for (const auto& p : cfg.excluded_predicates) allowed.erase(p);

  std::vector<Edge> edges;
  for (const Triple& t : ctx.g1.subject_range(target)) {
    const EntityId* v = t.object.entity_if();
    if (!live(t) || !v || *v == target || !allowed.count(t.predicate)) continue;
    edges.push_back(Edge{t.predicate, *v, true});
  }
  for (std::uint32_t idx : ctx.g1.by_object(target)) {
    const Triple& t = ctx.g1.at(idx);
    if (!live(t) || t.subject == target || !allowed.count(t.predicate)) continue;
    edges.push_back(Edge{t.predicate, t.subject, false});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Candidate> out;
  for (const auto& e : edges) {
    if (e == seed_edge) continue;
    check_deadline(ctx);
    out.push_back(Candidate{e, edge_set(ctx.g1, e)});
  }
  return out;
}

struct ConstraintSet {
  EntityId target;
  std::vector<Edge> edges;  // seed edge first
  std::vector<ValueSet> sets;
  ValueSet answers;  // intersection of sets
  std::vector<Candidate> unused;
};

// Greedy constraint selection: each step adds the candidate leaving the
// fewest answers; ties go to the smaller standalone set, then to the lower
// property and anchor ids. Stops at one answer or when the budget is spent
// or nothing shrinks the set further. At least one constraint is added when
// any candidate exists.
ConstraintSet greedy_constraints(EntityId target, const Edge& seed_edge, const SynthContext& ctx) {
  ConstraintSet cs;
  cs.target = target;
  cs.edges.push_back(seed_edge);
  cs.sets.push_back(edge_set(ctx.g1, seed_edge));
  cs.answers = cs.sets.front();
  cs.unused = candidate_edges(target, seed_edge, ctx);

  std::size_t added = 0;
  while (added < ctx.config.budget.max_constraints && (cs.answers.size() > 1 || added == 0)) {
    check_deadline(ctx);
    std::size_t best = cs.unused.size();
    std::tuple<std::size_t, std::size_t, EntityId, EntityId, bool> best_key;
    for (std::size_t i = 0; i < cs.unused.size(); ++i) {
      const auto& c = cs.unused[i];
      const std::size_t remaining = intersection_size(cs.answers, c.set);
      if (remaining >= cs.answers.size() && cs.answers.size() > 1) continue;
      auto key = std::tuple(remaining, c.set.size(), c.edge.predicate, c.edge.anchor,
                            !c.edge.outgoing);
      if (best == cs.unused.size() || key < best_key) {
        best = i;
        best_key = key;
      }
    }
    if (best == cs.unused.size()) break;
    Candidate chosen = std::move(cs.unused[best]);
    cs.unused.erase(cs.unused.begin() + static_cast<std::ptrdiff_t>(best));
    cs.answers = intersect(cs.answers, chosen.set);
    cs.edges.push_back(chosen.edge);
    cs.sets.push_back(std::move(chosen.set));
    ++added;
  }
  return cs;
}

// Targets a seed can support, subject first.
std::vector<std::pair<EntityId, Edge>> targets_of(const Triple& seed) {
  std::vector<std::pair<EntityId, Edge>> out;
  const EntityId* obj = seed.object.entity_if();
  if (!obj) return out;
  out.emplace_back(seed.subject, Edge{seed.predicate, *obj, true});
  if (*obj != seed.subject) out.emplace_back(*obj, Edge{seed.predicate, seed.subject, false});
  return out;
}

QuestionInstance make_instance(Level level, QuerySpec spec, ObjectValue gold, const Triple& seed,
                               std::vector<PatternBlock> constraints, const SynthContext& ctx) {
  QuestionInstance inst;
  inst.level = level;
  inst.spec = std::move(spec);
  inst.gold = std::move(gold);
  inst.seed_triples = {seed};
  inst.constraints_used = std::move(constraints);
  inst.provenance.from = ctx.from;
  inst.provenance.to = ctx.g1.snapshot();
  inst.provenance.created_at =
      ctx.config.created_at.empty() ? ctx.g1.snapshot().timestamp : ctx.config.created_at;
  finish_instance(inst, ctx.g1, ctx.config.language);
  return inst;
}

// Confirms the query has exactly one answer and that it is `gold`.
bool verified(const QuerySpec& spec, const ObjectValue& gold, const TripleStore& g1) {
  if (count_answers(spec, g1) != 1) return false;
  const ResultSet rs = evaluate(spec, g1);
  return rs.bindings.size() == 1 && rs.bindings.front() == gold;
}

QuerySpec grouped_spec(std::vector<PatternBlock> blocks, sparql::CountOp op) {
  QuerySpec spec;
  spec.select_var = kTargetVar;
  const std::size_t n = blocks.size();
  spec.blocks = std::move(blocks);
  spec.grouping = sparql::Grouping{kTargetVar, op, n};
  return spec;
}

// Entities reaching `cls` through P31 then P279*, via reverse traversal.
ValueSet class_members(EntityId cls, const TripleStore& g) {
  std::set<EntityId> classes{cls};
  std::vector<EntityId> stack{cls};
  while (!stack.empty()) {
    const EntityId c = stack.back();
    stack.pop_back();
    for (std::uint32_t idx : g.by_object(c, sparql::kSubclassOf)) {
      const Triple& t = g.at(idx);
      if (live(t) && classes.insert(t.subject).second) stack.push_back(t.subject);
    }
  }
  ValueSet out;
  for (EntityId c : classes) {
    for (std::uint32_t idx : g.by_object(c, sparql::kInstanceOf)) {
      const Triple& t = g.at(idx);
      if (live(t)) out.emplace_back(t.subject);
    }
  }
  normalize(out);
  return out;
}

struct FuzzCandidate {
  std::size_t block_index;
  EntityId cls;
  int depth;
  ValueSet broadened;
};

// Classes one and two steps above `anchor`, shallowest depth kept.
std::vector<std::pair<EntityId, int>> hypernyms(EntityId anchor, const TripleStore& g) {
  std::map<EntityId, int> found;
  for (const Triple& t : g.group(anchor, sparql::kInstanceOf)) {
    if (const EntityId* c = t.object.entity_if(); live(t) && c) found.emplace(*c, 1);
  }
  std::vector<EntityId> first;
  for (const auto& [c, d] : found) first.push_back(c);
  for (EntityId c : first) {
    for (const Triple& t : g.group(c, sparql::kSubclassOf)) {
      if (const EntityId* p = t.object.entity_if(); live(t) && p) found.emplace(*p, 2);
    }
  }
  found.erase(anchor);
  return {found.begin(), found.end()};
}

std::string aux_var(std::string_view base, std::size_t i) {
  return std::string(base) + std::to_string(i);
}

PatternBlock broadened_block(const Edge& e, std::size_t index, EntityId cls) {
  const std::string var = aux_var("_c", index);
  const Variable x{kTargetVar};
  PatternBlock b;
  if (e.outgoing) {
    b.patterns.push_back(Pattern{x, e.predicate, Variable{var}});
  } else {
    b.patterns.push_back(Pattern{Variable{var}, e.predicate, x});
  }
  b.filters.push_back(FilterExpr{FilterKind::kTypeConstraint, var, {}, {}, cls});
  return b;
}

// Broadened candidate set: the edge's set with the anchor replaced by every
// member of the class.
ValueSet broadened_set(const Edge& e, const ValueSet& members, const SynthContext& ctx) {
  ValueSet out;
  for (const auto& m : members) {
    check_deadline(ctx);
    const ValueSet part = edge_set(ctx.g1, Edge{e.predicate, m.entity(), e.outgoing});
    out.insert(out.end(), part.begin(), part.end());
  }
  normalize(out);
  return out;
}

struct ExtraBlock {
  PatternBlock block;
  ValueSet set;
};

// Two-edge paths leaving the target: (?x p1 h) and (h p2 v).
std::vector<ExtraBlock> hop_blocks(EntityId target, EntityId avoid, const SynthContext& ctx) {
  std::vector<ExtraBlock> out;
  const auto& excluded = ctx.config.excluded_predicates;
  const std::string h = aux_var("_h", 0);
  for (const Triple& first : ctx.g1.subject_range(target)) {
    const EntityId* mid = first.object.entity_if();
    if (!live(first) || !mid || *mid == target || *mid == avoid ||
        excluded.count(first.predicate)) {
      continue;
    }
    for (const Triple& second : ctx.g1.subject_range(*mid)) {
      const EntityId* end = second.object.entity_if();
      if (!live(second) || !end || *end == target || *end == *mid ||
          excluded.count(second.predicate)) {
        continue;
      }
      if (out.size() >= ctx.config.max_hop_candidates) return out;
      check_deadline(ctx);
      PatternBlock b;
      b.patterns.push_back(Pattern{Variable{kTargetVar}, first.predicate, Variable{h}});
      b.patterns.push_back(Pattern{Variable{h}, second.predicate, *end});
      ValueSet set;
      for (const auto& hv : subjects_of(ctx.g1, second.predicate, *end)) {
        const ValueSet part = subjects_of(ctx.g1, first.predicate, hv.entity());
        set.insert(set.end(), part.begin(), part.end());
      }
      normalize(set);
      const bool duplicate = std::any_of(out.begin(), out.end(),
                                         [&](const ExtraBlock& e) { return e.block == b; });
      if (!duplicate) out.push_back(ExtraBlock{std::move(b), std::move(set)});
    }
  }
  return out;
}

TierResult reject(SynthReject r) { return TierResult{std::nullopt, r}; }

TierResult l2_for_target(const Triple& seed, EntityId target, const Edge& seed_edge,
                         const SynthContext& ctx) {
  ConstraintSet cs = greedy_constraints(target, seed_edge, ctx);
  if (cs.edges.size() < 2) return reject(SynthReject::kNoConstraints);
  const ObjectValue gold(target);
  if (cs.answers.size() != 1 || cs.answers.front() != gold) return reject(SynthReject::kNotUnique);
  std::vector<PatternBlock> blocks;
  for (const auto& e : cs.edges) blocks.push_back(edge_block(e));
  QuerySpec spec = grouped_spec(blocks, sparql::CountOp::kEqual);
  if (!verified(spec, gold, ctx.g1)) return reject(SynthReject::kNotUnique);
  return TierResult{make_instance(Level::kL2, std::move(spec), gold, seed, std::move(blocks), ctx),
                    std::nullopt};
}

TierResult l3_for_target(const Triple& seed, EntityId target, const Edge& seed_edge,
                         const SynthContext& ctx) {
  ConstraintSet cs = greedy_constraints(target, seed_edge, ctx);
  if (cs.edges.size() < 2) return reject(SynthReject::kNoConstraints);
  const ObjectValue gold(target);

  // Broadening candidates over every block anchor.
  std::vector<FuzzCandidate> fuzzes;
  for (std::size_t i = 0; i < cs.edges.size(); ++i) {
    for (const auto& [cls, depth] : hypernyms(cs.edges[i].anchor, ctx.g1)) {
      check_deadline(ctx);
      ValueSet wide = broadened_set(cs.edges[i], class_members(cls, ctx.g1), ctx);
      if (wide.size() <= cs.sets[i].size()) continue;  // strict enlargement only
      fuzzes.push_back(FuzzCandidate{i, cls, depth, std::move(wide)});
    }
  }
  if (fuzzes.empty()) return reject(SynthReject::kNoFuzzCandidate);
  std::sort(fuzzes.begin(), fuzzes.end(), [&](const FuzzCandidate& a, const FuzzCandidate& b) {
    const std::size_t ga = a.broadened.size() - cs.sets[a.block_index].size();
    const std::size_t gb = b.broadened.size() - cs.sets[b.block_index].size();
    return std::tuple(a.depth, gb, a.block_index, a.cls) <
           std::tuple(b.depth, ga, b.block_index, b.cls);
  });
  if (fuzzes.size() > ctx.config.budget.max_fuzz_attempts) {
    fuzzes.resize(ctx.config.budget.max_fuzz_attempts);
  }

  for (const auto& fz : fuzzes) {
    check_deadline(ctx);
    const Edge& fuzzed_edge = cs.edges[fz.block_index];
    ValueSet answers = fz.broadened;
    std::vector<PatternBlock> blocks;
    for (std::size_t i = 0; i < cs.edges.size(); ++i) {
      if (i == fz.block_index) {
        blocks.push_back(broadened_block(fuzzed_edge, i, fz.cls));
      } else {
        blocks.push_back(edge_block(cs.edges[i]));
        answers = intersect(answers, cs.sets[i]);
      }
    }

    // Extra block: remaining single edges first, then two-edge paths.
    std::vector<ExtraBlock> extras;
    std::vector<const Candidate*> singles;
    for (const auto& c : cs.unused) {
      if (c.edge.anchor != fuzzed_edge.anchor) singles.push_back(&c);
    }
    std::sort(singles.begin(), singles.end(), [](const Candidate* a, const Candidate* b) {
      return std::tuple(a->set.size(), a->edge.predicate, a->edge.anchor, !a->edge.outgoing) <
             std::tuple(b->set.size(), b->edge.predicate, b->edge.anchor, !b->edge.outgoing);
    });
    for (const Candidate* c : singles) extras.push_back(ExtraBlock{edge_block(c->edge), c->set});
    for (auto& hop : hop_blocks(target, fuzzed_edge.anchor, ctx)) extras.push_back(std::move(hop));

    for (auto& extra : extras) {
      const ValueSet final_set = intersect(answers, extra.set);
      if (final_set.size() != 1 || final_set.front() != gold) continue;
      std::vector<PatternBlock> all = blocks;
      all.push_back(extra.block);
      QuerySpec spec = grouped_spec(all, sparql::CountOp::kAtLeast);
      if (!verified(spec, gold, ctx.g1)) continue;
      FuzzRecord record{fz.block_index,      edge_block(fuzzed_edge), all[fz.block_index],
                        fuzzed_edge.anchor,  fz.cls,                  fz.depth,
                        cs.sets[fz.block_index].size(), fz.broadened.size()};
      QuestionInstance inst =
          make_instance(Level::kL3, std::move(spec), gold, seed, std::move(all), ctx);
      inst.fuzz = std::move(record);
      return TierResult{std::move(inst), std::nullopt};
    }
  }
  return reject(SynthReject::kNoDisambiguatingHop);
}

using TargetRoutine = TierResult (*)(const Triple&, EntityId, const Edge&, const SynthContext&);

// Runs a multi-block tier over the seed's targets; the first success wins,
// otherwise the last rejection is reported.
TierResult over_targets(const Triple& seed, const SynthContext& ctx, TargetRoutine routine) {
  const auto targets = targets_of(seed);
  if (targets.empty()) return reject(SynthReject::kLiteralTarget);
  TierResult last = reject(SynthReject::kNoConstraints);
  for (const auto& [target, edge] : targets) {
    TierResult r = routine(seed, target, edge, ctx);
    if (r.instance) return r;
    last = std::move(r);
  }
  return last;
}

template <typename F>
TierResult guarded(F&& f) {
  try {
    return f();
  } catch (const TimeCapHit&) {
    return reject(SynthReject::kTimeCap);
  }
}

}  // namespace

void SynthBudget::validate() const {
  if (max_constraints < 1) throw ConfigError("max_constraints must be positive");
  if (max_fuzz_attempts < 1) throw ConfigError("max_fuzz_attempts must be positive");
  if (per_seed_time_cap.count() <= 0) throw ConfigError("per_seed_time_cap must be positive");
}

std::vector<EntityId> default_constraint_predicates() {
  std::vector<EntityId> out;
  for (std::uint64_t n : {106, 17, 27, 1416, 54, 108, 69, 463, 39, 136, 131, 495, 361, 118, 641,
                          166}) {
    out.push_back(EntityId::property(n));
  }
  return out;
}

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  for (std::uint64_t n : kDefaultExcludedPredicates) {
    c.excluded_predicates.insert(EntityId::property(n));
  }
  return c;
}

void SynthConfig::validate() const {
  budget.validate();
  if (language.empty()) throw ConfigError("synthesis language must not be empty");
  if (max_hop_candidates < 1) throw ConfigError("max_hop_candidates must be positive");
  for (const auto& p : constraint_predicates) {
    if (!p.is_property()) throw ConfigError("constraint predicate " + p.str() + " is not a property");
  }
}

nlohmann::ordered_json SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["max_constraints"] = budget.max_constraints;
  j["max_fuzz_attempts"] = budget.max_fuzz_attempts;
  j["per_seed_time_cap_ms"] = budget.per_seed_time_cap.count();
  j["constraint_predicates"] = nlohmann::ordered_json::array();
  for (const auto& p : constraint_predicates) j["constraint_predicates"].push_back(p.str());
  j["excluded_predicates"] = nlohmann::ordered_json::array();
  for (const auto& p : excluded_predicates) j["excluded_predicates"].push_back(p.str());
  j["language"] = language;
  j["max_hop_candidates"] = max_hop_candidates;
  j["created_at"] = created_at;
  return j;
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c = defaults();
  try {
    c.budget.max_constraints = j.value("max_constraints", c.budget.max_constraints);
    c.budget.max_fuzz_attempts = j.value("max_fuzz_attempts", c.budget.max_fuzz_attempts);
    c.budget.per_seed_time_cap = std::chrono::milliseconds{
        j.value("per_seed_time_cap_ms", static_cast<long long>(c.budget.per_seed_time_cap.count()))};
    if (j.contains("constraint_predicates")) {
      c.constraint_predicates.clear();
      for (const auto& p : j["constraint_predicates"]) {
        c.constraint_predicates.push_back(EntityId::parse(p.get<std::string>()));
      }
    }
    if (j.contains("excluded_predicates")) {
      c.excluded_predicates.clear();
      for (const auto& p : j["excluded_predicates"]) {
        c.excluded_predicates.insert(EntityId::parse(p.get<std::string>()));
      }
    }
    c.language = j.value("language", c.language);
    c.max_hop_candidates = j.value("max_hop_candidates", c.max_hop_candidates);
    c.workers = j.value("workers", c.workers);
    c.created_at = j.value("created_at", c.created_at);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid synthesis config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("invalid synthesis config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string_view to_string(SynthReject r) {
  switch (r) {
    case SynthReject::kMultipleObjects: return "multiple_objects";
    case SynthReject::kNoLiveObject: return "no_live_object";
    case SynthReject::kLiteralTarget: return "literal_target";
    case SynthReject::kNoConstraints: return "no_constraints";
    case SynthReject::kNotUnique: return "not_unique";
    case SynthReject::kNoFuzzCandidate: return "no_fuzz_candidate";
    case SynthReject::kNoDisambiguatingHop: return "no_disambiguating_hop";
    case SynthReject::kTimeCap: return "time_cap";
  }
  return "";
}

TierResult synthesize_L1(const Triple& seed, const SynthContext& ctx) {
  return guarded([&]() -> TierResult {
    if (!live(seed) || !ctx.g1.contains(seed.subject, seed.predicate, seed.object, false)) {
      return reject(SynthReject::kNoLiveObject);
    }
    const ValueSet objects = objects_of(ctx.g1, seed.subject, seed.predicate);
    if (objects.size() != 1) return reject(SynthReject::kMultipleObjects);
    QuerySpec spec;
    spec.select_var = kL1Var;
    spec.blocks.push_back(PatternBlock{
        {Pattern{seed.subject, seed.predicate, Variable{kL1Var}}}, {}});
    spec.limit = 2;
    if (!verified(spec, seed.object, ctx.g1)) return reject(SynthReject::kMultipleObjects);
    std::vector<PatternBlock> blocks = spec.blocks;
    return TierResult{make_instance(Level::kL1, std::move(spec), seed.object, seed,
                                    std::move(blocks), ctx),
                      std::nullopt};
  });
}

TierResult synthesize_L2(const Triple& seed, const SynthContext& ctx) {
  return guarded([&] { return over_targets(seed, ctx, &l2_for_target); });
}

TierResult synthesize_L3(const Triple& seed, const SynthContext& ctx) {
  return guarded([&] { return over_targets(seed, ctx, &l3_for_target); });
}

TierResult synthesize_question(const Triple& seed, const SynthContext& ctx, Level level) {
  switch (level) {
    case Level::kL1: return synthesize_L1(seed, ctx);
    case Level::kL2: return synthesize_L2(seed, ctx);
    case Level::kL3: return synthesize_L3(seed, ctx);
  }
  throw SynthError("unknown level " + std::to_string(static_cast<int>(level)));
}

nlohmann::ordered_json SynthReport::to_json() const {
  nlohmann::ordered_json j;
  j["seeds"] = seeds;
  j["emitted"] = nlohmann::ordered_json::object();
  j["rejected"] = nlohmann::ordered_json::object();
  for (Level l : kAllLevels) {
    const std::string name(to_string(l));
    auto it = emitted.find(l);
    j["emitted"][name] = it == emitted.end() ? 0 : it->second;
    j["rejected"][name] = nlohmann::ordered_json::object();
    if (auto r = rejected.find(l); r != rejected.end()) {
      for (const auto& [reason, n] : r->second) j["rejected"][name][reason] = n;
    }
  }
  j["seeds_without_instance"] = seeds_without_instance;
  return j;
}

SynthOutput synthesize_all(const std::vector<Triple>& seeds, const TripleStore& g1,
                           const SnapshotInfo& from, const SynthConfig& config) {
  config.validate();
  std::vector<Triple> ordered = seeds;
  std::sort(ordered.begin(), ordered.end(), CanonicalLess{});
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  struct Outcome {
    std::optional<QuestionInstance> instance;
    std::vector<std::pair<Level, SynthReject>> rejections;
  };
  std::vector<Outcome> outcomes(ordered.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ordered.size(); i = next++) {
      SynthContext ctx{g1, from, config,
                       std::chrono::steady_clock::now() + config.budget.per_seed_time_cap};
      for (Level level : kAllLevels) {
        TierResult r = synthesize_question(ordered[i], ctx, level);
        if (r.instance) {
          outcomes[i].instance = std::move(r.instance);
          break;
        }
        outcomes[i].rejections.emplace_back(level, *r.reason);
        if (*r.reason == SynthReject::kTimeCap) break;
      }
    }
  };
  std::size_t workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, ordered.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = ordered.size();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  SynthOutput out;
  out.report.seeds = ordered.size();
  for (auto& o : outcomes) {
    for (const auto& [level, reason] : o.rejections) {
      ++out.report.rejected[level][std::string(to_string(reason))];
    }
    if (o.instance) {
      ++out.report.emitted[o.instance->level];
      out.instances.push_back(std::move(*o.instance));
    } else {
      ++out.report.seeds_without_instance;
    }
  }
  return out;
}

}  // namespace kgdelta
