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
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "kgdelta/finalize.hpp"
#include "kgdelta/render.hpp"
#include "kgdelta/synth.hpp"
#include "random_graph.hpp"
#include "stub_endpoint.hpp"

namespace kgdelta {
namespace {

using testing::Q;
using testing::triple;
namespace fb = testing::football;

std::string openssl_sha256(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

class FinalizeTest : public ::testing::Test {
 protected:
  FinalizeTest() : g0_(fb::store(0)), g1_(fb::store(1)), synth_(SynthConfig::defaults()) {
    const SynthContext ctx{g1_, g0_.snapshot(), synth_, std::nullopt};
    const auto templates = TemplateSet::defaults();
    auto rendered = [&](TierResult r) {
      auto inst = *r.instance;
      inst.question = *render_question(inst, templates, g1_).text;
      return inst;
    };
    l1_ = rendered(synthesize_L1(triple(fb::kIclr2026, fb::kCountry, fb::kBrazil), ctx));
    l2_ = rendered(synthesize_L2(triple(fb::kRonaldo, fb::kTeam, fb::kAlNassr), ctx));
    l3_ = rendered(synthesize_L3(triple(fb::kTomasVarga, fb::kTeam, fb::kAlHilal), ctx));
  }

  static QuestionInstance with_text(QuestionInstance inst, std::string text, std::string id) {
    inst.question = std::move(text);
    inst.id = std::move(id);
    return inst;
  }

  TripleStore g0_;
  TripleStore g1_;
  SynthConfig synth_;
  QuestionInstance l1_, l2_, l3_;
};

TEST(JaccardTest, TokenSetOverlap) {
  EXPECT_DOUBLE_EQ(jaccard_similarity("a b c", "a b d"), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_similarity("Who, is X?", "who is x"), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity("a a b", "b"), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity("x", ""), 0.0);
}

TEST_F(FinalizeTest, KeepsValidInstancesInOrder) {
  const auto r = finalize({l1_, l2_, l3_}, g1_, FinalizeConfig{});
  ASSERT_EQ(r.benchmark.size(), 3u);
  EXPECT_EQ(r.benchmark[0].id, l1_.id);
  EXPECT_EQ(r.benchmark[2].id, l3_.id);
  EXPECT_EQ(r.report.input_count, 3u);
  EXPECT_EQ(r.report.kept_count, 3u);
  EXPECT_TRUE(r.report.dropped.empty());
}

TEST_F(FinalizeTest, ExactAndNearDuplicates) {
  // 20 distinct tokens; one extra token gives Jaccard 20/21 > 0.9.
  const std::string base = "t1 t2 t3 t4 t5 t6 t7 t8 t9 t10 t11 t12 t13 t14 t15 t16 t17 t18 t19 t20";
  const auto a = with_text(l2_, base, "L2-a");
  const auto dup = with_text(l2_, base, "L2-dup");
  const auto near = with_text(l2_, base + " t21", "L2-near");
  const auto far = with_text(l2_, "t1 t2 t3 t4 t5 t6 t7 t8 t9 t10 t11 t12 t13 t14 t15 t16 t17 t18 u1 u2", "L2-far");
  const auto other_gold = with_text(l1_, base + " t22", "L1-other");
  const auto r = finalize({a, dup, near, far, other_gold}, g1_, FinalizeConfig{});
  EXPECT_EQ(r.report.dropped.at("duplicate_text"), 1u);
  EXPECT_EQ(r.report.dropped.at("near_duplicate"), 1u);
  ASSERT_EQ(r.benchmark.size(), 3u);
  EXPECT_EQ(r.benchmark[0].id, "L2-a");
  EXPECT_EQ(r.benchmark[1].id, "L2-far");
  EXPECT_EQ(r.benchmark[2].id, "L1-other");
  const std::vector<std::pair<std::string, std::string>> drops{{"L2-dup", "duplicate_text"},
                                                                {"L2-near", "near_duplicate"}};
  EXPECT_EQ(r.report.drops, drops);
}

TEST_F(FinalizeTest, NearDuplicateThresholdIsStrict) {
  // Nine shared tokens out of ten: exactly 0.9, not above it.
  const auto a = with_text(l2_, "t1 t2 t3 t4 t5 t6 t7 t8 t9", "a");
  const auto b = with_text(l2_, "t1 t2 t3 t4 t5 t6 t7 t8 t9 t10", "b");
  EXPECT_DOUBLE_EQ(jaccard_similarity(a.question, b.question), 0.9);
  EXPECT_EQ(finalize({a, b}, g1_, FinalizeConfig{}).benchmark.size(), 2u);
}

TEST_F(FinalizeTest, DropsInstancesThatNoLongerHaveOneAnswer) {
  auto loose = l2_;
  loose.spec.grouping->threshold = 2;
  loose.question = "loose";
  auto wrong_gold = l1_;
  wrong_gold.gold = Q(851);
  wrong_gold.question = "wrong gold";
  const auto r = finalize({loose, wrong_gold}, g1_, FinalizeConfig{});
  EXPECT_EQ(r.report.dropped.at("not_unique"), 2u);
  EXPECT_TRUE(r.benchmark.empty());
}

TEST_F(FinalizeTest, AliasCollisionMakesQuestionAmbiguous) {
  const auto collided = fb::alias_collision_store();
  EXPECT_EQ(count_answers(l2_.spec, collided), 1u);
  EXPECT_EQ(regrounded_count(l2_.spec, collided, "en"), 2u);
  EXPECT_EQ(regrounded_count(l2_.spec, g1_, "en"), 1u);

  const auto r = finalize({l1_, l2_, l3_}, collided, FinalizeConfig{});
  EXPECT_EQ(r.report.dropped.at("ambiguous_surface_form"), 1u);
  EXPECT_EQ(r.benchmark.size(), 2u);

  FinalizeConfig off;
  off.surface_regrounding = false;
  EXPECT_EQ(finalize({l1_, l2_, l3_}, collided, off).benchmark.size(), 3u);
}

TEST_F(FinalizeTest, RemoteModesNeedAClient) {
  FinalizeConfig c;
  c.validator = ValidatorMode::kRemote;
  EXPECT_THROW(finalize({l1_}, g1_, c), ConfigError);
  EXPECT_EQ(validator_mode_from_string("both"), ValidatorMode::kBoth);
  EXPECT_FALSE(validator_mode_from_string("sometimes"));
}

TEST_F(FinalizeTest, RemoteAndCrossValidation) {
  testing::StubEndpoint stub(&g1_);
  RemoteConfig rc;
  rc.endpoint = stub.url();
  RemoteClient client(rc);
  client.set_sleeper([](std::chrono::milliseconds) {});

  FinalizeConfig remote;
  remote.validator = ValidatorMode::kRemote;
  EXPECT_EQ(finalize({l1_, l2_, l3_}, g1_, remote, &client).benchmark.size(), 3u);

  // An endpoint still serving the older snapshot sees none of these answers.
  stub.use_store(&g0_);
  const auto r = finalize({l1_, l2_}, g1_, remote, &client);
  EXPECT_EQ(r.report.dropped.at("remote_not_unique"), 2u);
  FinalizeConfig both;
  both.validator = ValidatorMode::kBoth;
  const auto rb = finalize({l1_, l2_}, g1_, both, &client);
  EXPECT_EQ(rb.report.dropped.at("validator_disagreement"), 2u);
}

TEST_F(FinalizeTest, RemoteFailureAbortsWithPartialReport) {
  testing::StubEndpoint stub(&g1_);
  stub.script({200, 400});
  RemoteConfig rc;
  rc.endpoint = stub.url();
  RemoteClient client(rc);
  FinalizeConfig c;
  c.validator = ValidatorMode::kRemote;
  try {
    finalize({l1_, l2_, l3_}, g1_, c, &client);
    FAIL() << "expected FinalizeAborted";
  } catch (const FinalizeAborted& e) {
    EXPECT_EQ(e.partial().kept_count, 1u);
    ASSERT_TRUE(e.partial().aborted);
    EXPECT_NE(e.partial().aborted->find(l2_.id), std::string::npos);
  }
}

TEST_F(FinalizeTest, BenchmarkRecordsRoundTrip) {
  for (const auto& inst : {l1_, l2_, l3_}) {
    const auto j = benchmark_record(inst);
    for (const char* key : {"id", "level", "question", "answer", "answer_label", "answer_aliases",
                            "sparql", "seed_triples", "constraints_used", "fuzz_applied",
                            "provenance"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(benchmark_record_from_json(nlohmann::json::parse(j.dump())), inst);
  }
  testing::TempDir dir;
  write_benchmark({l1_, l2_, l3_}, dir / "benchmark.jsonl");
  EXPECT_EQ(read_benchmark(dir / "benchmark.jsonl"), (std::vector<QuestionInstance>{l1_, l2_, l3_}));
}

TEST_F(FinalizeTest, ManifestHashesEveryLine) {
  const std::vector<QuestionInstance> bench{l1_, l2_, l3_};
  const auto m = make_manifest(bench, g0_.snapshot(), g1_.snapshot(), "digest", 42,
                               {{Level::kL1, 1}, {Level::kL2, 1}, {Level::kL3, 1}}, "2025-09-01T00:00:00Z");
  ASSERT_EQ(m.instance_hashes.size(), 3u);
  testing::TempDir dir;
  write_benchmark(bench, dir / "b.jsonl");
  std::ifstream in(dir / "b.jsonl");
  std::string line;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    EXPECT_EQ(m.instance_hashes.at(i), openssl_sha256(line + "\n"));
  }
  EXPECT_EQ(m.counts.at(Level::kL2), 1u);
  const auto back = BenchmarkManifest::from_json(nlohmann::json::parse(m.to_json().dump()));
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_THROW(BenchmarkManifest::from_json(nlohmann::json::object()), FormatError);
}

TEST(SampleTest, ExactQuotasReproducibleAndOrderPreserving) {
  const auto pool = testing::synthetic_pool({{Level::kL1, 400}, {Level::kL2, 300}, {Level::kL3, 120}});
  const std::map<Level, std::size_t> quotas{{Level::kL1, 150}, {Level::kL2, 100}, {Level::kL3, 50}};
  const auto a = stratified_sample(pool, quotas, 20250901);
  const auto b = stratified_sample(pool, quotas, 20250901);
  EXPECT_EQ(a, b);
  std::map<Level, std::size_t> counts;
  for (const auto& inst : a) ++counts[inst.level];
  EXPECT_EQ(counts, quotas);
  std::size_t pos = 0;
  for (const auto& inst : a) {
    while (pos < pool.size() && pool[pos].id != inst.id) ++pos;  // ids appear in pool order
    ASSERT_LT(pos, pool.size());
  }
  EXPECT_NE(stratified_sample(pool, quotas, 1), a);
}

TEST(SampleTest, ShortfallReportsMissingCounts) {
  const auto pool = testing::synthetic_pool({{Level::kL1, 10}, {Level::kL2, 3}, {Level::kL3, 0}});
  try {
    stratified_sample(pool, {{Level::kL1, 5}, {Level::kL2, 5}, {Level::kL3, 2}}, 0);
    FAIL() << "expected SampleShortfall";
  } catch (const SampleShortfall& e) {
    const std::map<Level, std::size_t> missing{{Level::kL2, 2}, {Level::kL3, 2}};
    EXPECT_EQ(e.missing(), missing);
  }
}

TEST(SampleTest, BoundedUniformIsInRangeAndRoughlyFlat) {
  std::mt19937_64 engine(3);
  std::vector<std::size_t> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = bounded_uniform(engine, 7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  double chi2 = 0;
  for (auto h : hist) chi2 += (h - 10000.0) * (h - 10000.0) / 10000.0;
  EXPECT_LT(chi2, 22.46);  // 6 degrees of freedom, p = 0.001
}

}  // namespace
}  // namespace kgdelta
