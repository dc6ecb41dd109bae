#include <gtest/gtest.h>

#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"
#include "selfgen/errors.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::E2eSchema;

TEST(SchemaTest, LoadsE2eSchema) {
  const DomainSchema& s = E2eSchema();
  EXPECT_EQ(s.attributes().size(), 8u);
  EXPECT_EQ(s.attributes().front().name, "eatType");
  EXPECT_EQ(s.attributes().back().name, "name");
  EXPECT_EQ(s.Attribute("familyFriendly").kind, ValueKind::kBinary);
  EXPECT_TRUE(s.Attribute("name").delexicalized);
}

TEST(SchemaTest, RoundTripsThroughJson) {
  const DomainSchema again = DomainSchema::FromJsonText(E2eSchema().ToJsonText());
  EXPECT_EQ(again.ToJsonText(), E2eSchema().ToJsonText());
}

TEST(SchemaTest, RejectsBadBinaryAttribute) {
  EXPECT_THROW(DomainSchema::FromJsonText(R"({"name":"x","dialogue_acts":[{"name":"inform"}],
      "attributes":[{"name":"a","kind":"binary","values":["yes","maybe"]}]})"),
               SchemaError);
  EXPECT_THROW(DomainSchema::FromJsonText("{not json"), SchemaError);
}

TEST(SchemaTest, CanonicalValueIsCaseInsensitive) {
  const DomainSchema& s = E2eSchema();
  const std::size_t food = *s.AttributeIndex("food");
  EXPECT_EQ(s.CanonicalValue(food, "italian"), "Italian");
  EXPECT_EQ(s.CanonicalValue(food, "Thai"), std::nullopt);
}

TEST(ValueTokenTest, Normalizes) {
  EXPECT_EQ(ValueToken("coffee shop"), "coffee_shop");
  EXPECT_EQ(ValueToken("Browns Cambridge"), "browns_cambridge");
  EXPECT_EQ(ValueToken("don't care"), "dont_care");
  EXPECT_TRUE(IsDontCareValue("dontcare"));
}

TEST(MrTest, ParsesBareE2eFormIntoCanonicalOrder) {
  const MeaningRepresentation mr =
      ParseMr("name[The Eagle], food[italian], eatType[pub]", E2eSchema());
  EXPECT_EQ(mr.act, "inform");
  ASSERT_EQ(mr.slots.size(), 3u);
  EXPECT_EQ(mr.slots[0], (Slot{"eatType", "pub"}));
  EXPECT_EQ(mr.slots[1], (Slot{"food", "Italian"}));
  EXPECT_EQ(mr.slots[2], (Slot{"name", "The Eagle"}));
  EXPECT_EQ(SerializeMr(mr), "inform(eatType[pub], food[Italian], name[The Eagle])");
}

TEST(MrTest, SerializeParseRoundTrip) {
  const MeaningRepresentation mr = ParseMr(
      "inform(name[Zizzi], priceRange[less than £20], near[Avalon], familyFriendly[no])",
      E2eSchema());
  EXPECT_EQ(ParseMr(SerializeMr(mr), E2eSchema()), mr);
}

TEST(MrTest, ErrorsCarryKindAndLine) {
  EXPECT_THROW(ParseMr("name[Zizzi], food[Thai]", E2eSchema()), SchemaError);
  EXPECT_THROW(ParseMr("food[Italian]", E2eSchema()), SchemaError);  // name required
  EXPECT_THROW(ParseMr("name[Zizzi], name[Cotto]", E2eSchema()), SchemaError);
  try {
    ParseMr("name[Zizzi", E2eSchema(), 7);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(MrTest, ValidityPredicate) {
  MeaningRepresentation mr{"inform", {{"name", "Zizzi"}, {"food", "French"}}};
  Canonicalize(&mr, E2eSchema());
  EXPECT_TRUE(IsValidMr(mr, E2eSchema()));
  mr.slots.push_back({"food", "Italian"});
  EXPECT_FALSE(IsValidMr(mr, E2eSchema()));
}

}  // namespace
}  // namespace selfgen
