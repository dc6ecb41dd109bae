#include <gtest/gtest.h>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::E2eSchema;
using Tokens = std::vector<std::string>;

const DomainSchema& LaptopSchema() {
  static const DomainSchema s = DomainSchema::LoadFile(testing::DataPath("laptop/schema.json"));
  return s;
}

TEST(DelexTest, ReplacesNameAndNear) {
  const MeaningRepresentation mr = ParseMr(
      "name[The Golden Curry], near[The Six Bells], familyFriendly[yes]", E2eSchema());
  const Utterance u = Utterance::FromText(
      "Near The Six Bells is a venue that is children friendly named The Golden Curry.");
  const auto [d, mapping] = Delexicalize(u, mr, E2eSchema(), {"name", "near"});
  EXPECT_EQ(Detokenize(d.tokens),
            "near NEAR is a venue that is children friendly named NAME .");
  EXPECT_EQ(mapping.size(), 2u);
  EXPECT_EQ(Relexicalize(d, mapping).tokens, u.tokens);
}

TEST(DelexTest, EmptySlotSetIsNoOp) {
  const MeaningRepresentation mr = ParseMr("name[Zizzi]", E2eSchema());
  const Utterance u = Utterance::FromText("Zizzi is nice.");
  const auto [d, mapping] = Delexicalize(u, mr, E2eSchema(), {});
  EXPECT_EQ(d.tokens, u.tokens);
  EXPECT_TRUE(mapping.empty());
}

TEST(DelexTest, MissNamesTheAttribute) {
  const MeaningRepresentation mr = ParseMr("name[Zizzi], near[Avalon]", E2eSchema());
  try {
    Delexicalize(Utterance::FromText("Zizzi is nice."), mr, E2eSchema(), {"name", "near"});
    FAIL();
  } catch (const DelexMissError& e) {
    EXPECT_EQ(e.attribute(), "near");
  }
}

TEST(DelexTest, RepeatedAttributesGetIndexedPlaceholders) {
  const MeaningRepresentation mr =
      ParseMr("compare(name[tecra m50], name[aspire e5])", LaptopSchema());
  const DelexMapping m = PlaceholderBindings(mr, LaptopSchema(), {"name"});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].placeholder, "NAME_1");
  EXPECT_EQ(m[1].placeholder, "NAME_2");
  const auto [d, mapping] = Delexicalize(
      Utterance::FromText("the tecra m50 beats the aspire e5 ."), mr, LaptopSchema(), {"name"});
  EXPECT_EQ(Detokenize(d.tokens), "the NAME_1 beats the NAME_2 .");
}

TEST(LinearizeTest, E2eLexicalized) {
  const MeaningRepresentation mr =
      ParseMr("name[The Mill], near[Avalon], food[Italian]", E2eSchema());
  EXPECT_EQ(Linearize(mr, E2eSchema(), InputMode::kE2eLex).tokens,
            (Tokens{"eat_type_n/a", "near_avalon", "area_n/a", "fam_friend_n/a",
                    "cust_rating_n/a", "price_range_n/a", "food_italian", "name_the_mill"}));
}

TEST(LinearizeTest, E2eDelexicalized) {
  const MeaningRepresentation mr =
      ParseMr("name[The Mill], near[Avalon], food[Italian]", E2eSchema());
  EXPECT_EQ(Linearize(mr, E2eSchema(), InputMode::kE2eDelex).tokens,
            (Tokens{"eat_type_n/a", "near_present", "area_n/a", "fam_friend_n/a",
                    "cust_rating_n/a", "price_range_n/a", "food_italian"}));
}

TEST(LinearizeTest, DaVariableFoldsValues) {
  const MeaningRepresentation mr = ParseMr(
      "InformCount(count[40], family[don't care], batteryRating[excellent])", LaptopSchema());
  EXPECT_EQ(Linearize(mr, LaptopSchema(), InputMode::kDaVariable).tokens,
            (Tokens{"inform_count", "count", "family_dont_care", "batteryrating"}));
  const MeaningRepresentation biz =
      ParseMr("inform(name[tecra m50], isForBusiness[yes], platform[linux])", LaptopSchema());
  EXPECT_EQ(Linearize(biz, LaptopSchema(), InputMode::kDaVariable).tokens,
            (Tokens{"inform", "name", "is_for_biz_yes", "platform_linux"}));
}

TEST(LinearizeTest, ModeNamesRoundTrip) {
  for (InputMode m : {InputMode::kE2eLex, InputMode::kE2eDelex, InputMode::kDaVariable}) {
    EXPECT_EQ(ParseInputMode(InputModeName(m)), m);
  }
  EXPECT_THROW(ParseInputMode("bogus"), Error);
}

}  // namespace
}  // namespace selfgen
