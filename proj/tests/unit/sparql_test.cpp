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

#include "fixtures.hpp"
#include "kgdelta/sparql.hpp"
#include "random_graph.hpp"

namespace kgdelta::sparql {
namespace {

using testing::P;
using testing::Q;

Pattern pat(std::string s, EntityId p, Term o) { return Pattern{Variable{std::move(s)}, p, std::move(o)}; }

QuerySpec single(PatternBlock b) {
  QuerySpec s;
  s.select_var = "x";
  s.blocks.push_back(std::move(b));
  return s;
}

TEST(SparqlBuildTest, SingleBlockIsInline) {
  EXPECT_EQ(build_sparql(single({{pat("x", P(17), Q(155))}, {}})),
            "SELECT ?x WHERE {\n  ?x wdt:P17 wd:Q155 .\n}");
}

TEST(SparqlBuildTest, UnionGroupingAndFilters) {
  QuerySpec s;
  s.select_var = "x";
  s.blocks.push_back({{pat("x", P(54), Q(8682))}, {}});
  PatternBlock b{{pat("x", P(54), Variable{"y"})}, {}};
  b.filters.push_back({FilterKind::kTypeConstraint, "y", {}, {}, Q(476028)});
  b.filters.push_back({FilterKind::kHopExists, "x", P(19), P(17), Q(3)});
  s.blocks.push_back(b);
  s.grouping = Grouping{"x", CountOp::kAtLeast, 2};
  s.limit = 2;
  EXPECT_EQ(build_sparql(s),
            "SELECT ?x WHERE {\n"
            "  { ?x wdt:P54 wd:Q8682 . }\n"
            "  UNION\n"
            "  { ?x wdt:P54 ?y . FILTER EXISTS { ?y wdt:P31/wdt:P279* wd:Q476028 . } "
            "FILTER EXISTS { ?x wdt:P19 ?_hop . ?_hop wdt:P17 wd:Q3 . } }\n"
            "} GROUP BY ?x HAVING (COUNT(?x)>=2) LIMIT 2");
}

TEST(SparqlBuildTest, StringLiteralsAreEscaped) {
  const auto s = single({{pat("x", P(1), Literal{"a\"b\n", LiteralType::kString})}, {}});
  EXPECT_NE(build_sparql(s).find(R"("a\"b\n")"), std::string::npos);
  EXPECT_EQ(parse_sparql(build_sparql(s)), s);
}

TEST(SparqlRoundTripTest, RandomSpecsSurviveBuildThenParse) {
  testing::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto spec = testing::random_syntax_spec(rng);
    ASSERT_NO_THROW(validate(spec));
    const auto text = build_sparql(spec);
    QuerySpec back;
    ASSERT_NO_THROW(back = parse_sparql(text)) << text;
    EXPECT_EQ(back, spec) << text;
    EXPECT_EQ(build_sparql(back), text);
  }
}

TEST(SparqlRoundTripTest, RandomGraphSpecsSurviveBuildThenParse) {
  testing::Rng rng(12);
  testing::GraphShape shape;
  const auto g = testing::random_graph(rng, shape);
  for (int i = 0; i < 300; ++i) {
    const auto spec = testing::random_spec(rng, g);
    EXPECT_EQ(parse_sparql(build_sparql(spec)), spec);
  }
}

TEST(SparqlParseTest, ToleratesCommentsAndFreeWhitespace) {
  const auto s = parse_sparql(
      "# the conference country\n"
      "select   ?x\nwhere{wd:Q125000000 wdt:P17 ?x.   # trailing\n}\n");
  ASSERT_EQ(s.blocks.size(), 1u);
  EXPECT_EQ(s.blocks[0].patterns[0].subject, Term(Q(125000000)));
  EXPECT_EQ(s.select_var, "x");
}

TEST(SparqlParseTest, ParsesHandWrittenUnionQuery) {
  const auto s = parse_sparql(R"(
    SELECT ?x WHERE {
      { ?x wdt:P54 wd:Q8682 . }
      UNION { ?x wdt:P54 wd:Q1422 . }
      UNION { ?x wdt:P54 wd:Q483880 . }
    } GROUP BY ?x HAVING (COUNT(?x) = 3)
  )");
  EXPECT_EQ(s.blocks.size(), 3u);
  ASSERT_TRUE(s.grouping);
  EXPECT_EQ(s.grouping->op, CountOp::kEqual);
  EXPECT_EQ(s.grouping->threshold, 3u);
  EXPECT_FALSE(s.limit);
}

std::string unsupported_construct(const std::string& text) {
  try {
    parse_sparql(text);
  } catch (const UnsupportedConstruct& e) {
    return e.construct();
  } catch (const SyntaxError& e) {
    return std::string("syntax:") + e.what();
  }
  return "accepted";
}

TEST(SparqlParseTest, RejectsConstructsOutsideTheFragment) {
  EXPECT_EQ(unsupported_construct("PREFIX wd: <http://x/> SELECT ?x WHERE { ?x wdt:P1 wd:Q1 . }"), "PREFIX");
  EXPECT_EQ(unsupported_construct("SELECT * WHERE { ?x wdt:P1 wd:Q1 . }"), "SELECT *");
  EXPECT_EQ(unsupported_construct("SELECT ?x WHERE { ?x wdt:P1 wd:Q1 . OPTIONAL { ?x wdt:P2 ?y . } }"),
            "OPTIONAL");
  EXPECT_EQ(unsupported_construct(
                "SELECT ?x WHERE { ?x wdt:P1 wd:Q1 . FILTER NOT EXISTS { ?x wdt:P2 wd:Q2 . } }"),
            "FILTER NOT EXISTS");
  EXPECT_EQ(unsupported_construct(
                "SELECT ?x WHERE { ?x wdt:P1 wd:Q1 . } GROUP BY ?x HAVING (COUNT(?x) < 2)"),
            "HAVING comparison '<'");
  EXPECT_EQ(unsupported_construct("ASK { ?x wdt:P1 wd:Q1 . }"), "ASK");
}

TEST(SparqlParseTest, ErrorsCarryLineAndColumn) {
  try {
    parse_sparql("SELECT ?x WHERE {\n  ?x wdt:P1 .\n}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(parse_sparql("SELECT ?x WHERE { ?x wdt:P1 wd:Q1 . "), SyntaxError);
  EXPECT_THROW(parse_sparql(""), SyntaxError);
}

TEST(SparqlValidateTest, StructuralInvariants) {
  EXPECT_THROW(validate(QuerySpec{"x", {}, {}, {}}), InvalidSpec);
  EXPECT_THROW(validate(single({{pat("y", P(1), Q(1))}, {}})), InvalidSpec);
  EXPECT_THROW(validate(single({{Pattern{Literal{"a", LiteralType::kString}, P(1), Variable{"x"}}}, {}})),
               InvalidSpec);
  EXPECT_THROW(validate(single({{pat("x", Q(1), Q(1))}, {}})), InvalidSpec);
  EXPECT_THROW(
      validate(single({{pat("x", P(1), Q(1))}, {{FilterKind::kTypeConstraint, "z", {}, {}, Q(5)}}})),
      InvalidSpec);
  auto grouped = single({{pat("x", P(1), Q(1))}, {}});
  grouped.grouping = Grouping{"y", CountOp::kEqual, 1};
  EXPECT_THROW(validate(grouped), InvalidSpec);
  grouped.grouping = Grouping{"x", CountOp::kEqual, 0};
  EXPECT_THROW(validate(grouped), InvalidSpec);
  auto limited = single({{pat("x", P(1), Q(1))}, {}});
  limited.limit = 0;
  EXPECT_THROW(validate(limited), InvalidSpec);
  EXPECT_THROW(build_sparql(limited), InvalidSpec);
}

TEST(SparqlJsonTest, BlocksAndFiltersRoundTrip) {
  PatternBlock b{{pat("x", P(19), Variable{"_h0"}), Pattern{Variable{"_h0"}, P(17), Q(1000030)}},
                 {{FilterKind::kAttributeEquals, "x", P(27), {}, Q(1000010)}}};
  EXPECT_EQ(block_from_json(block_to_json(b)), b);
  for (const auto& f : {FilterExpr{FilterKind::kTypeConstraint, "x", {}, {}, Q(5)},
                        FilterExpr{FilterKind::kHopExists, "x", P(19), P(17), Q(7)}}) {
    EXPECT_EQ(filter_from_json(filter_to_json(f)), f);
  }
  EXPECT_EQ(block_variables(b), (std::vector<std::string>{"x", "_h0"}));
}

}  // namespace
}  // namespace kgdelta::sparql
