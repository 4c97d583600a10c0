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
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "kgdelta/eval_harness.hpp"
#include "oracles.hpp"
#include "pass_at_k_fixture.hpp"

namespace kgdelta::eval {
namespace {

TEST(FractionTest, LowestTermsAndArithmetic) {
  EXPECT_EQ(Fraction(2, 4), Fraction(1, 2));
  EXPECT_EQ(Fraction(3, -6), Fraction(-1, 2));
  EXPECT_EQ(Fraction(0, 7), Fraction(0, 1));
  EXPECT_EQ(Fraction(1, 4) - Fraction(9, 20), Fraction(-1, 5));
  EXPECT_EQ(Fraction(1, 3) + Fraction(1, 6), Fraction(1, 2));
  EXPECT_TRUE(Fraction(1, 3) < Fraction(1, 2));
  EXPECT_EQ(Fraction(-1, 5).str(), "-1/5");
  EXPECT_EQ(Fraction(4, 2).str(), "2");
  EXPECT_THROW(Fraction(1, 0), EvalError);
}

TEST(NormalizeTest, Examples) {
  EXPECT_EQ(normalize_answer("  The   Beijing. "), "beijing");
  EXPECT_EQ(normalize_answer("A Tale of Two Cities"), "tale of two cities");
  EXPECT_EQ(normalize_answer("\"Brazil\"!"), "brazil");
  EXPECT_EQ(normalize_answer("Cafe\xCC\x81"), normalize_answer("Caf\xC3\xA9"));
  EXPECT_EQ(normalize_answer("the the an"), "");
  EXPECT_EQ(normalize_answer("Al-Nassr"), "al-nassr");
}

TEST(NormalizeTest, IdempotentOnFuzzedStrings) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> pieces{"a", "an", "the", "The", " ", "  ", "\t", ".", ",", "!",
                                        "\"", "'", "(", ")", "x", "Bo", "e\xCC\x81", "\xC3\x89",
                                        "-", "THE", "\xE2\x80\x9C", "9", "\n", "an."};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const std::size_t n = rng() % 12;
    for (std::size_t j = 0; j < n; ++j) s += pieces[rng() % pieces.size()];
    const std::string once = normalize_answer(s);
    EXPECT_EQ(normalize_answer(once), once) << "input: " << s;
  }
}

TEST(ScoreEmTest, AliasesAndStrictMode) {
  EXPECT_TRUE(score_em("cristiano ronaldo", "Cristiano Ronaldo"));
  EXPECT_TRUE(score_em("CR7", "Cristiano Ronaldo", {"CR7"}));
  EXPECT_FALSE(score_em("CR7", "Cristiano Ronaldo", {"CR7"}, true));
  EXPECT_FALSE(score_em("Ronaldo", "Cristiano Ronaldo", {"CR7"}));
}

TEST(PromptTest, QuestionIsAppended) {
  const std::string p = render_prompt("In which country will the ICLR2026 conference be held?");
  EXPECT_EQ(p.rfind(std::string(kPromptTemplate), 0), 0u);
  EXPECT_EQ(p.substr(kPromptTemplate.size()), "In which country will the ICLR2026 conference be held?");
  for (const char* tag : {"<think>", "</think>", "<search>", "</search>", "<information>",
                          "</information>", "<answer>", "</answer>"}) {
    EXPECT_NE(kPromptTemplate.find(tag), std::string_view::npos) << tag;
  }
  EXPECT_EQ(kPromptTemplate.substr(kPromptTemplate.size() - 10), "Question: ");
}

TEST(ExtractAnswerTest, Examples) {
  EXPECT_EQ(extract_answer("<think>hm</think><answer> Beijing </answer>"), "Beijing");
  EXPECT_EQ(extract_answer("<answer>a</answer> more <answer>b</answer>"), "b");
  EXPECT_EQ(extract_answer("<answer>a</answer> <answer>unterminated"), "a");
  EXPECT_EQ(extract_answer("no tags"), std::nullopt);
  EXPECT_EQ(extract_answer("</answer><answer>"), std::nullopt);
  EXPECT_EQ(extract_answer("<answer>\n\tBrazil\r\n</answer>"), "Brazil");
}

TEST(ExtractAnswerTest, AgreesWithReverseScanOracle) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> pieces{"<answer>", "</answer>", " ", "x", "Brazil", "<think>",
                                        "</think>", "\n", "<answ", "er>", "<search>q</search>"};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const std::size_t n = rng() % 10;
    for (std::size_t j = 0; j < n; ++j) s += pieces[rng() % pieces.size()];
    EXPECT_EQ(extract_answer(s), testing::reverse_scan_answer(s)) << s;
  }
}

TEST(PassAtKTest, HandComputedFixture) {
  const auto f = testing::pass_at_k_fixture();
  const auto gold = gold_table(f.benchmark);
  EXPECT_EQ(pass_at_k(f.no_search, gold, 1).value, Fraction(1, 4));
  EXPECT_EQ(pass_at_k(f.no_search, gold, 2).value, Fraction(2, 5));
  EXPECT_EQ(pass_at_k(f.no_search, gold, 3).value, Fraction(1, 2));
  EXPECT_EQ(pass_at_k(f.no_search, gold, 4).value, Fraction(11, 20));
  EXPECT_EQ(pass_at_k(f.search, gold, 1).value, Fraction(9, 20));
  EXPECT_EQ(delta_k(f.no_search, f.search, gold, 1), Fraction(-1, 5));
  EXPECT_EQ(delta_k(f.no_search, f.search, gold, 2), Fraction(-1, 20));
  EXPECT_EQ(delta_k(f.no_search, f.search, gold, 3), Fraction(1, 20));
  EXPECT_EQ(delta_k(f.no_search, f.search, gold, 4), Fraction(1, 10));
}

TEST(PassAtKTest, ShortRecordsAreSkipped) {
  const auto f = testing::pass_at_k_fixture();
  const auto r = pass_at_k(f.search, gold_table(f.benchmark), 2);
  EXPECT_EQ(r.scored, 0u);
  EXPECT_EQ(r.skipped.size(), 20u);
  EXPECT_EQ(r.value, Fraction(0, 1));
}

TEST(PassAtKTest, Errors) {
  const auto f = testing::pass_at_k_fixture();
  const auto gold = gold_table(f.benchmark);
  EXPECT_THROW(pass_at_k(f.no_search, gold, 0), EvalError);
  auto unknown = f.search;
  unknown[0].instance_id = "missing";
  EXPECT_THROW(pass_at_k(unknown, gold, 1), EvalError);
  auto fewer = f.search;
  fewer.pop_back();
  EXPECT_THROW(delta_k(f.no_search, fewer, gold, 1), EvalError);
}

TEST(PassAtKTest, MonotoneInK) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<QuestionInstance> bench;
    std::vector<PredictionRecord> recs;
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      QuestionInstance inst;
      inst.id = "i" + std::to_string(i);
      inst.gold_label = "g";
      bench.push_back(inst);
      PredictionRecord r{inst.id, Mode::kNoSearch, {}};
      for (int s = 0; s < 8; ++s) r.samples.push_back(rng() % 4 == 0 ? "g" : "h");
      recs.push_back(r);
    }
    const auto gold = gold_table(bench);
    Fraction prev(0, 1);
    for (std::size_t k = 1; k <= 8; ++k) {
      const Fraction cur = pass_at_k(recs, gold, k).value;
      EXPECT_TRUE(prev <= cur);
      prev = cur;
    }
  }
}

TEST(ScoreTest, ReportAndCsv) {
  const auto f = testing::pass_at_k_fixture();
  std::vector<PredictionRecord> all = f.no_search;
  all.insert(all.end(), f.search.begin(), f.search.end());
  const auto report = score(f.benchmark, all, {1, 2, 3, 4});
  ASSERT_EQ(report.modes.size(), 2u);
  EXPECT_EQ(report.modes.at(Mode::kNoSearch).em_overall, Fraction(1, 4));
  EXPECT_EQ(report.modes.at(Mode::kSearch).em_overall, Fraction(9, 20));
  EXPECT_EQ(report.delta_k.at(4), Fraction(1, 10));
  EXPECT_EQ(report.verdicts.size(), 40u);
  const auto csv = report.verdicts_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance_id,level,mode,em_alias,em_strict");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
  EXPECT_NE(report.delta_grid_csv().find("all,4,1,10,0.1\n"), std::string::npos);
  const auto& l1 = report.delta_k_per_level.at(Level::kL1);
  // Level 1 is q00, q03, ..., q18. No-search pass@4: q00 q03 q06 q09 hit (4 of 7); search hits q00 q12 q15 (3 of 7).
  EXPECT_EQ(l1.at(4), Fraction(1, 7));
  auto dup = all;
  dup.push_back(all.front());
  EXPECT_THROW(score(f.benchmark, dup, {1}), EvalError);
}

TEST(PredictionsTest, ReadsSamplesAndTranscripts) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "p.jsonl");
    out << R"({"instance_id":"q00","mode":"no_search","samples":["a","b"]})" << "\n\n"
        << R"({"instance_id":"q01","mode":"search","transcripts":["<answer> Rome </answer>","none"]})" << "\n";
  }
  const auto recs = read_predictions(dir / "p.jsonl");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].samples, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(recs[1].mode, Mode::kSearch);
  EXPECT_EQ(recs[1].samples, (std::vector<std::string>{"Rome", ""}));
  {
    std::ofstream out(dir / "bad.jsonl");
    out << R"({"instance_id":"q00","mode":"guess","samples":["a"]})" << "\n";
  }
  EXPECT_THROW(read_predictions(dir / "bad.jsonl"), EvalError);
}

}  // namespace
}  // namespace kgdelta::eval
