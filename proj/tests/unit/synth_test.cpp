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


#include <gtest/gtest.h>

#include <algorithm>
#include <iostream>

#include "fixtures.hpp"
#include "kgdelta/candidate_filter.hpp"
#include "kgdelta/evaluator.hpp"
#include "kgdelta/synth.hpp"
#include "oracles.hpp"
#include "random_graph.hpp"

namespace kgdelta {
namespace {

using sparql::CountOp;
using sparql::FilterKind;
using testing::P;
using testing::Q;
using testing::triple;
namespace fb = testing::football;

class FootballSynthTest : public ::testing::Test {
 protected:
  FootballSynthTest()
      : g0_(fb::store(0)), g1_(fb::store(1)), config_(SynthConfig::defaults()),
        ctx_{g1_, g0_.snapshot(), config_, std::nullopt} {}

  TripleStore g0_;
  TripleStore g1_;
  SynthConfig config_;
  SynthContext ctx_;
};

TEST_F(FootballSynthTest, L1SingleObjectSeed) {
  const auto r = synthesize_L1(triple(fb::kIclr2026, fb::kCountry, fb::kBrazil), ctx_);
  ASSERT_TRUE(r.instance);
  const auto& inst = *r.instance;
  EXPECT_EQ(inst.level, Level::kL1);
  EXPECT_EQ(inst.gold, ObjectValue(fb::kBrazil));
  EXPECT_EQ(inst.gold_label, "Brazil");
  EXPECT_EQ(inst.sparql, "SELECT ?b WHERE {\n  wd:Q125000000 wdt:P17 ?b .\n} LIMIT 2");
  EXPECT_EQ(inst.id, instance_id(Level::kL1, inst.sparql, inst.gold));
  EXPECT_EQ(inst.provenance.from, g0_.snapshot());
  EXPECT_EQ(inst.provenance.to, g1_.snapshot());
  EXPECT_EQ(inst.provenance.created_at, fb::kT1Timestamp);
  EXPECT_EQ(count_answers(inst.spec, g1_), 1u);
}

TEST_F(FootballSynthTest, L1RejectsMultiValuedAndDeadSeeds) {
  EXPECT_EQ(synthesize_L1(triple(fb::kRonaldo, fb::kTeam, fb::kAlNassr), ctx_).reason,
            SynthReject::kMultipleObjects);
  EXPECT_EQ(synthesize_L1(triple(fb::kRonaldo, fb::kCountry, fb::kBrazil), ctx_).reason,
            SynthReject::kNoLiveObject);
  EXPECT_EQ(synthesize_L1(triple(Q(3000002), fb::kCitizenship, fb::kValdoria, Rank::kDeprecated), ctx_)
                .reason,
            SynthReject::kNoLiveObject);
}

TEST_F(FootballSynthTest, L2RonaldoNeedsThreeClubs) {
  const auto r = synthesize_L2(triple(fb::kRonaldo, fb::kTeam, fb::kAlNassr), ctx_);
  ASSERT_TRUE(r.instance);
  const auto& inst = *r.instance;
  EXPECT_EQ(inst.gold, ObjectValue(fb::kRonaldo));
  ASSERT_EQ(inst.constraints_used.size(), 3u);
  EXPECT_EQ(inst.constraints_used[0].patterns[0].object, sparql::Term(fb::kAlNassr));
  // Manchester United's larger member set loses the tie-break to Juventus.
  EXPECT_EQ(inst.constraints_used[1].patterns[0].object, sparql::Term(fb::kJuventus));
  EXPECT_EQ(inst.constraints_used[2].patterns[0].object, sparql::Term(fb::kRealMadrid));
  ASSERT_TRUE(inst.spec.grouping);
  EXPECT_EQ(inst.spec.grouping->op, CountOp::kEqual);
  EXPECT_EQ(inst.spec.grouping->threshold, 3u);
  EXPECT_EQ(evaluate(inst.spec, g1_).bindings, std::vector<ObjectValue>{fb::kRonaldo});
  // The same question had no answer before the transfer.
  EXPECT_EQ(count_answers(inst.spec, g0_), 0u);
}

TEST_F(FootballSynthTest, L2FailsOnTwinPlayers) {
  const auto r = synthesize_L2(triple(fb::kTomasVarga, fb::kTeam, fb::kAlHilal), ctx_);
  EXPECT_FALSE(r.instance);
  ASSERT_TRUE(r.reason);
  EXPECT_TRUE(*r.reason == SynthReject::kNotUnique || *r.reason == SynthReject::kNoConstraints);
}

TEST_F(FootballSynthTest, L3BroadensClubAndAddsBirthplaceHop) {
  const auto r = synthesize_L3(triple(fb::kTomasVarga, fb::kTeam, fb::kAlHilal), ctx_);
  ASSERT_TRUE(r.instance);
  const auto& inst = *r.instance;
  EXPECT_EQ(inst.level, Level::kL3);
  EXPECT_EQ(inst.gold, ObjectValue(fb::kTomasVarga));
  ASSERT_TRUE(inst.fuzz);
  EXPECT_EQ(inst.fuzz->anchor, fb::kAlHilal);
  EXPECT_EQ(inst.fuzz->cls, fb::kSaudiClub);
  EXPECT_EQ(inst.fuzz->depth, 1);
  EXPECT_LT(inst.fuzz->original_size, inst.fuzz->broadened_size);
  EXPECT_EQ(inst.spec.grouping->op, CountOp::kAtLeast);
  EXPECT_EQ(inst.spec.grouping->threshold, inst.spec.blocks.size());
  const auto& hop = inst.constraints_used.back();
  ASSERT_EQ(hop.patterns.size(), 2u);
  EXPECT_EQ(hop.patterns[0].predicate, fb::kBirthPlace);
  EXPECT_EQ(hop.patterns[1].object, sparql::Term(fb::kZedland));
  EXPECT_EQ(evaluate(inst.spec, g1_).bindings, std::vector<ObjectValue>{fb::kTomasVarga});
}

TEST_F(FootballSynthTest, LiteralSeedsHaveNoMultiBlockTarget) {
  const auto seed = triple(fb::kRonaldo, fb::kImage, testing::str("Ronaldo.jpg"));
  EXPECT_EQ(synthesize_L2(seed, ctx_).reason, SynthReject::kLiteralTarget);
  EXPECT_EQ(synthesize_L3(seed, ctx_).reason, SynthReject::kLiteralTarget);
}

TEST_F(FootballSynthTest, ExpiredDeadlineIsTimeCap) {
  SynthContext late{g1_, g0_.snapshot(), config_, std::chrono::steady_clock::now() - std::chrono::seconds(1)};
  EXPECT_EQ(synthesize_L3(triple(fb::kTomasVarga, fb::kTeam, fb::kAlHilal), late).reason,
            SynthReject::kTimeCap);
}

TEST_F(FootballSynthTest, SynthesizeAllOverFilteredDelta) {
  const auto pool = filter_candidates(compute_delta(g0_, g1_), g1_, FilterConfig::defaults()).pool;
  const auto out = synthesize_all(pool, g1_, g0_.snapshot(), config_);
  EXPECT_EQ(out.report.seeds, pool.size());
  std::size_t emitted = 0;
  for (const auto& [level, n] : out.report.emitted) emitted += n;
  EXPECT_EQ(emitted, out.instances.size());
  EXPECT_EQ(emitted + out.report.seeds_without_instance, out.report.seeds);
  EXPECT_EQ(out.report.emitted.at(Level::kL1), 1u);
  EXPECT_EQ(out.report.emitted.at(Level::kL3), 1u);

  auto serial_config = config_;
  serial_config.workers = 1;
  const auto serial = synthesize_all(pool, g1_, g0_.snapshot(), serial_config);
  EXPECT_EQ(serial.instances, out.instances);
}

TEST(SynthConfigTest, JsonRoundTripAndValidation) {
  auto c = SynthConfig::defaults();
  c.budget.max_constraints = 3;
  c.language = "de";
  const auto back = SynthConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  EXPECT_EQ(back.budget.max_constraints, 3u);
  EXPECT_EQ(back.language, "de");
  EXPECT_EQ(back.constraint_predicates, c.constraint_predicates);
  EXPECT_EQ(back.excluded_predicates, c.excluded_predicates);
  EXPECT_THROW(SynthConfig::from_json(nlohmann::json{{"max_constraints", 0}}), ConfigError);
  EXPECT_THROW(SynthConfig::from_json(nlohmann::json{{"language", ""}}), ConfigError);
}

// Every emitted instance, checked against the brute-force evaluator.
TEST(SynthPropertyTest, InstancesHaveExactlyTheGoldAnswer) {
  testing::Rng rng(77);
  testing::WorldShape shape;
  shape.players = 60;
  shape.clubs = 12;
  std::size_t checked = 0;
  std::map<Level, std::size_t> per_level;
  for (int w = 0; w < 4; ++w) {
    const auto world = testing::random_world(rng, shape);
    const auto store = testing::build_store(world.triples, world.labels);
    const testing::BruteForceEvaluator oracle(world.triples, world.labels);
    const auto config = SynthConfig::defaults();
    const SynthContext ctx{store, store.snapshot(), config, std::nullopt};
    for (const auto& seed : world.seeds) {
      for (Level level : kAllLevels) {
        const auto r = synthesize_question(seed, ctx, level);
        ASSERT_NE(r.instance.has_value(), r.reason.has_value());
        if (!r.instance) continue;
        const auto& inst = *r.instance;
        EXPECT_EQ(oracle.answers(inst.spec), std::vector<ObjectValue>{inst.gold}) << inst.sparql;
        EXPECT_EQ(count_answers(inst.spec, store), 1u);
        EXPECT_EQ(sparql::parse_sparql(inst.sparql), inst.spec);
        EXPECT_LE(inst.constraints_used.size(), 1 + config.budget.max_constraints + (level == Level::kL3));
        if (level == Level::kL3) {
          ASSERT_TRUE(inst.fuzz);
          const auto narrow = oracle.block_answers(inst.fuzz->original, "x");
          const auto wide = oracle.block_answers(inst.fuzz->broadened, "x");
          EXPECT_TRUE(std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end()));
          EXPECT_LT(narrow.size(), wide.size());
          EXPECT_EQ(narrow.size(), inst.fuzz->original_size);
          EXPECT_EQ(wide.size(), inst.fuzz->broadened_size);
        }
        ++per_level[level];
        ++checked;
      }
    }
  }
  EXPECT_GT(per_level[Level::kL1], 0u);
  EXPECT_GT(per_level[Level::kL2], 0u);
  EXPECT_GT(per_level[Level::kL3], 0u);
  std::cout << "checked " << checked << " instances\n";
}

// Greedy selection is not guaranteed minimal. Measure how far it is from the
// exhaustive optimum over the same candidate edges.
TEST(SynthPropertyTest, GreedyConstraintCountVersusOptimum) {
  testing::Rng rng(78);
  testing::WorldShape shape;
  shape.players = 60;
  shape.clubs = 12;
  const auto config = SynthConfig::defaults();
  std::set<EntityId> allowed(config.constraint_predicates.begin(), config.constraint_predicates.end());
  std::size_t instances = 0, suboptimal = 0, worst_gap = 0;
  for (int w = 0; w < 4; ++w) {
    const auto world = testing::random_world(rng, shape);
    const auto store = testing::build_store(world.triples, world.labels);
    const testing::BruteForceEvaluator oracle(world.triples, world.labels);
    const SynthContext ctx{store, store.snapshot(), config, std::nullopt};
    for (const auto& seed : world.seeds) {
      const auto r = synthesize_L2(seed, ctx);
      if (!r.instance) continue;
      const auto& inst = *r.instance;
      const EntityId gold = inst.gold.entity();
      const auto seed_set = oracle.block_answers(inst.constraints_used[0], "x");
      std::vector<std::set<ObjectValue>> candidates;
      for (const auto& t : world.triples) {
        if (t.rank == Rank::kDeprecated || !t.object.is_entity()) continue;
        if (!allowed.count(t.predicate) && t.predicate != seed.predicate) continue;
        if (t.subject == gold && t.object.entity() != gold) {
          candidates.push_back(oracle.block_answers(
              {{sparql::Pattern{sparql::Variable{"x"}, t.predicate, t.object.entity()}}, {}}, "x"));
        } else if (t.object.entity() == gold && t.subject != gold) {
          candidates.push_back(oracle.block_answers(
              {{sparql::Pattern{t.subject, t.predicate, sparql::Variable{"x"}}}, {}}, "x"));
        }
      }
      const auto best = testing::minimum_constraint_count(seed_set, candidates, inst.gold,
                                                          config.budget.max_constraints);
      ASSERT_TRUE(best.has_value());
      const std::size_t used = inst.constraints_used.size() - 1;
      EXPECT_GE(used, *best);
      ++instances;
      if (used > *best) {
        ++suboptimal;
        worst_gap = std::max(worst_gap, used - *best);
      }
    }
  }
  EXPECT_GT(instances, 0u);
  std::cout << "greedy: " << instances << " instances, " << suboptimal
            << " above optimum, worst gap " << worst_gap << "\n";
  ::testing::Test::RecordProperty("greedy_suboptimal", static_cast<int>(suboptimal));
  ::testing::Test::RecordProperty("greedy_worst_gap", static_cast<int>(worst_gap));
}

}  // namespace
}  // namespace kgdelta
