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
#include "kgdelta/canonical_io.hpp"
#include "kgdelta/digest.hpp"
#include "kgdelta/entity.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
namespace {

using testing::P;
using testing::Q;

TEST(EntityIdTest, ParsesItemsAndProperties) {
  EXPECT_EQ(EntityId::parse("Q42"), Q(42));
  EXPECT_EQ(EntityId::parse("P31"), P(31));
  EXPECT_TRUE(EntityId::parse("Q1").is_item());
  EXPECT_TRUE(EntityId::parse("P1").is_property());
  EXPECT_EQ(Q(11571).str(), "Q11571");
  EXPECT_EQ(P(279).str(), "P279");
}

TEST(EntityIdTest, RejectsMalformedIds) {
  for (const char* bad : {"", "Q", "Q0", "Q012", "q42", "L5", "Q-1", "Q1a", " Q1", "Q99999999999999999999999"}) {
    EXPECT_FALSE(EntityId::try_parse(bad).has_value()) << bad;
    EXPECT_THROW(EntityId::parse(bad), FormatError) << bad;
  }
}

TEST(EntityIdTest, OrdersPropertiesBeforeItemsThenNumerically) {
  EXPECT_LT(P(999), Q(1));
  EXPECT_LT(Q(2), Q(10));
  EXPECT_LT(P(17), P(170));
}

TEST(EntityTest, RankAndLiteralNamesRoundTrip) {
  for (Rank r : {Rank::kPreferred, Rank::kNormal, Rank::kDeprecated}) {
    EXPECT_EQ(rank_from_string(to_string(r)), r);
  }
  for (LiteralType t : {LiteralType::kString, LiteralType::kQuantity, LiteralType::kTime,
                        LiteralType::kCoordinate, LiteralType::kMonolingual, LiteralType::kOpaque}) {
    EXPECT_EQ(literal_type_from_string(to_string(t)), t);
  }
  EXPECT_FALSE(rank_from_string("best").has_value());
  EXPECT_FALSE(literal_type_from_string("blob").has_value());
}

TEST(EntityTest, ObjectValuesOrderEntitiesBeforeLiterals) {
  const ObjectValue e(Q(5));
  const ObjectValue l(Literal{"a", LiteralType::kString});
  EXPECT_LT(e, l);
  EXPECT_EQ(e.display(), "Q5");
  EXPECT_EQ(l.display(), "a");
}

TEST(TextTest, NfcComposesCombiningMarks) {
  EXPECT_EQ(text::nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(text::nfc("plain"), "plain");
}

TEST(TextTest, LowerNfcHandlesNonAscii) {
  EXPECT_EQ(text::lower_nfc("\xC3\x89""COLE"), "\xC3\xA9""cole");
  EXPECT_EQ(text::lower_nfc("ABC def"), "abc def");
}

TEST(TextTest, NormalizeLiteralTrimsButKeepsCase) {
  EXPECT_EQ(text::normalize_literal("  Rio de Janeiro \t"), "Rio de Janeiro");
  EXPECT_EQ(text::trim("\n x \n"), "x");
}

TEST(TextTest, SurfaceKeyFoldsCasePunctuationAndSpacing) {
  EXPECT_EQ(text::surface_key("Al-Nassr"), text::surface_key("al  nassr"));
  EXPECT_EQ(text::surface_key("F.C. Porto"), text::surface_key("f c porto"));
  EXPECT_NE(text::surface_key("Al Nassr"), text::surface_key("Al Hilal"));
}

TEST(TextTest, SplitWhitespaceDropsEmptyTokens) {
  EXPECT_EQ(text::split_whitespace("  a  b\tc\n"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(text::split_whitespace("   ").empty());
}

TEST(TextTest, StripPunctRemovesOnlySurroundingPunctuation) {
  EXPECT_EQ(text::strip_punct("\"Brazil.\""), "Brazil");
  EXPECT_EQ(text::strip_punct("\xC2\xAB""Al-Nassr!\xC2\xBB"), "Al-Nassr");
  EXPECT_EQ(text::strip_punct("..."), "");
  EXPECT_TRUE(text::ends_with_punct("done."));
  EXPECT_FALSE(text::starts_with_punct("done."));
}

TEST(DigestTest, MatchesKnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(DigestTest, IncrementalEqualsOneShot) {
  Sha256 h;
  h.update("ab");
  h.update("");
  h.update("c");
  EXPECT_EQ(h.hex_digest(), sha256_hex("abc"));
}

TEST(CanonicalIoTest, ObjectJsonRoundTripsEveryType) {
  std::vector<ObjectValue> values{ObjectValue(Q(1))};
  for (LiteralType t : {LiteralType::kString, LiteralType::kQuantity, LiteralType::kTime,
                        LiteralType::kCoordinate, LiteralType::kMonolingual, LiteralType::kOpaque}) {
    values.emplace_back(Literal{"value \"x\" \xC3\xA9", t});
  }
  for (const auto& v : values) {
    EXPECT_EQ(object_from_json(Json::parse(object_to_json(v).dump())), v);
  }
}

TEST(CanonicalIoTest, TripleJsonRoundTripsRankSidAndQualifiers) {
  Triple t = testing::triple(Q(1), P(2), Q(3), Rank::kPreferred, "Q1$abc");
  t.qualifiers = R"({"P580":["+2020"]})";
  EXPECT_EQ(triple_from_json(Json::parse(triple_to_json(t).dump())), t);
  EXPECT_EQ(canonical_triple_line(t), canonical_triple_line(t));
}

TEST(CanonicalIoTest, StoreRoundTripPreservesHashAndLabels) {
  testing::TempDir dir;
  const TripleStore a = testing::build_store(
      {testing::triple(Q(1), P(2), Q(3)), testing::triple(Q(1), P(4), testing::str("x"))},
      {testing::label(Q(1), "One", {"Uno"})}, "snap", "2025-01-01T00:00:00Z");
  write_store(a, dir / "g");
  const TripleStore b = read_store(dir / "g");
  EXPECT_EQ(b.snapshot(), a.snapshot());
  EXPECT_EQ(hash_store(b), a.snapshot().hash);
  ASSERT_EQ(b.labels().size(), 1u);
  EXPECT_EQ(b.labels()[0], a.labels()[0]);
  EXPECT_EQ(read_store_info(dir / "g"), a.snapshot());
}

}  // namespace
}  // namespace kgdelta
