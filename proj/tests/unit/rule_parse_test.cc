#include <gtest/gtest.h>

#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/normalize.h"
#include "selfgen/errors.h"
#include "selfgen/mrparse/fscore.h"
#include "selfgen/mrparse/rule_pack.h"
#include "selfgen/mrparse/templates.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::DataPath;
using testing::E2eSchema;

const RulePack& E2ePack() {
  static const RulePack p = RulePack::LoadFile(DataPath("e2e/rules.txt"), E2eSchema());
  return p;
}

ParseOutcome Parse(const std::string& text, const DelexMapping* b = nullptr) {
  return RuleParse(Utterance::FromText(text), E2ePack(), b);
}

TEST(RulePackTest, FamilyFriendlyPattern) {
  const ParseOutcome p = Parse("The Eagle is family friendly .");
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_EQ(p.mr->ValueOf("familyFriendly"), "yes");
  EXPECT_EQ(p.mr->ValueOf("name"), "The Eagle");
}

TEST(RulePackTest, NegationSubsumesPositiveMatch) {
  const ParseOutcome p = Parse("The Eagle is not kid friendly .");
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_EQ(p.mr->ValueOf("familyFriendly"), "no");
}

TEST(RulePackTest, PlaceholderNeedsBinding) {
  const ParseOutcome unbound = Parse("NAME is a pub .");
  EXPECT_FALSE(unbound.valid);
  ASSERT_NE(unbound.Evidence("name"), nullptr);
  EXPECT_EQ(unbound.Evidence("name")->values[0], "NAME");

  const DelexMapping b{{"NAME", "name", "Zizzi"}};
  const ParseOutcome bound = Parse("NAME is a pub .", &b);
  ASSERT_TRUE(bound.valid) << bound.reason;
  EXPECT_EQ(SerializeMr(*bound.mr), "inform(eatType[pub], name[Zizzi])");
}

TEST(RulePackTest, ConflictingValuesInvalidate) {
  const ParseOutcome p = Parse("Zizzi serves italian food and french food .");
  EXPECT_FALSE(p.valid);
  EXPECT_FALSE(p.mr.has_value());
  ASSERT_NE(p.Evidence("food"), nullptr);
  EXPECT_EQ(p.Evidence("food")->values.size(), 2u);
}

TEST(RulePackTest, RepeatedSameValueCountsOnce) {
  const ParseOutcome p = Parse("Zizzi is a pub . the pub serves italian food .");
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_EQ(p.mr->Count("eatType"), 1u);
  EXPECT_EQ(p.Evidence("eatType")->spans.size(), 2u);
}

TEST(RulePackTest, MissingNameIsInvalid) {
  const ParseOutcome p = Parse("a cheap pub in the city centre .");
  EXPECT_FALSE(p.valid);
  EXPECT_EQ(p.mr, std::nullopt);
}

TEST(RulePackTest, LiteralSpansHiddenFromPatterns) {
  const ParseOutcome p = Parse("Zizzi is a pub near Raja Indian Cuisine .");
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_FALSE(p.mr->Has("food"));
  EXPECT_EQ(p.mr->ValueOf("near"), "Raja Indian Cuisine");
}

TEST(RulePackTest, CaptureGroupMapsToVocabulary) {
  const ParseOutcome p = Parse("Zizzi has a customer rating of 3 out of 5 and costs £20-25 .");
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_EQ(p.mr->ValueOf("customerRating"), "3 out of 5");
  EXPECT_EQ(p.mr->ValueOf("priceRange"), "£20-25");
}

TEST(RulePackTest, InsensitiveToRepeatedWhitespace) {
  const ParseOutcome a = Parse("Zizzi  is   a pub");
  const ParseOutcome b = Parse("Zizzi is a pub");
  ASSERT_TRUE(a.valid && b.valid);
  EXPECT_EQ(*a.mr, *b.mr);
}

TEST(RulePackTest, DslErrors) {
  EXPECT_THROW(RulePack::FromText("[attribute nope]\n", E2eSchema()), SchemaError);
  EXPECT_THROW(RulePack::FromText("pub => pub\n", E2eSchema()), ParseError);
  EXPECT_THROW(RulePack::FromText("[attribute eatType]\n\\bbar\\b => bar\n", E2eSchema()),
               SchemaError);
  EXPECT_THROW(RulePack::FromText("[attribute eatType]\n(pub => pub\n", E2eSchema()),
               ParseError);
  EXPECT_THROW(RulePack::FromText("[attribute food]\nx => $2\n", E2eSchema()), ParseError);
  EXPECT_THROW(RulePack::FromText("[attribute food]\n@placeholder\n", E2eSchema()),
               SchemaError);
  // Comments and the escaped arrow.
  const RulePack p = RulePack::FromText(
      "# c\n[attribute eatType]\n\\ba =\\> b\\b => pub\n", E2eSchema());
  ASSERT_EQ(p.Find("eatType")->patterns.size(), 1u);
  EXPECT_EQ(p.Find("eatType")->patterns[0].source, "\\ba =\\> b\\b");
}

TEST(RulePackTest, DaActCues) {
  const DomainSchema& s = testing::LaptopSchema();
  const RulePack pack = RulePack::LoadFile(DataPath("laptop/rules.txt"), s);
  const DelexMapping b{{"NAME_1", "name", "tecra m50"}, {"NAME_2", "name", "aspire e5"},
                       {"MEMORY_1", "memory", "4 gb"}, {"MEMORY_2", "memory", "8 gb"}};
  const ParseOutcome cmp = RuleParse(
      Utterance::FromText("compared to each other , the NAME_1 is with MEMORY_1 of memory "
                          "while the NAME_2 is with MEMORY_2 of memory ."),
      pack, &b);
  ASSERT_TRUE(cmp.valid) << cmp.reason;
  EXPECT_TRUE(SameMr(*cmp.mr, ParseMr("compare(name[tecra m50], memory[4 gb], "
                                      "name[aspire e5], memory[8 gb])", s)));

  const ParseOutcome none = RuleParse(Utterance::FromText("the NAME_1 has MEMORY_1 ."), pack, &b);
  EXPECT_FALSE(none.valid);
  const ParseOutcome two = RuleParse(
      Utterance::FromText("i recommend it . goodbye ."), pack, nullptr);
  EXPECT_FALSE(two.valid);
}

TEST(RulePackTest, LaptopFixtureParsesExactly) {
  const DomainSchema& s = testing::LaptopSchema();
  const RulePack pack = RulePack::LoadFile(DataPath("laptop/rules.txt"), s);
  const Dataset ds = LoadDaCorpus(DataPath("laptop/train.json"), s);
  for (const Example& ex : ds.examples) {
    const ParseOutcome p = RuleParse(ex.refs[0], pack);
    ASSERT_TRUE(p.valid) << ex.refs[0].raw << ": " << p.reason;
    EXPECT_TRUE(SameMr(*p.mr, ex.mr)) << ex.refs[0].raw;
  }
}

TEST(TemplateTest, ExhaustiveCorpusRecoversEveryMr) {
  for (const std::string domain : {"e2e", "toy"}) {
    const DomainSchema s = DomainSchema::LoadFile(DataPath(domain + "/schema.json"));
    const RulePack pack = RulePack::LoadFile(DataPath(domain + "/rules.txt"), s);
    const TemplateSet t = TemplateSet::LoadFile(DataPath(domain + "/templates.json"), s);
    const Dataset ds{s, ExhaustiveTemplateCorpus(t), Split::kTest};
    std::size_t pairs = 0;
    for (const AttributeDef& a : s.attributes()) pairs += a.values.size();
    EXPECT_EQ(ds.examples.size(), pairs) << domain;
    for (const Example& ex : ds.examples) {
      const ParseOutcome p = RuleParse(ex.refs[0], pack);
      ASSERT_TRUE(p.valid) << ex.refs[0].raw << ": " << p.reason;
      EXPECT_EQ(*p.mr, ex.mr) << ex.refs[0].raw;
    }
    const ParserScores sc = ParserFScore(
        [&](const Utterance& u) { return EvidenceSlots(RuleParse(u, pack)); }, ds);
    EXPECT_DOUBLE_EQ(sc.macro_precision, 1.0);
    EXPECT_DOUBLE_EQ(sc.macro_recall, 1.0);
  }
}

TEST(TemplateTest, DelexicalizedTemplatesParseWithBindings) {
  const TemplateSet t = TemplateSet::LoadFile(DataPath("e2e/templates.json"), E2eSchema());
  for (const Example& ex : ExhaustiveTemplateCorpus(t)) {
    auto [delex, mapping] = Delexicalize(ex.refs[0], ex.mr, E2eSchema(), {"name", "near"});
    const ParseOutcome p = RuleParse(delex, E2ePack(), &mapping);
    ASSERT_TRUE(p.valid) << delex.raw;
    EXPECT_EQ(*p.mr, ex.mr);
  }
}

TEST(TemplateTest, MissingPhraseRejected) {
  EXPECT_THROW(TemplateSet::FromJsonText(R"({"subject": "name", "phrases": {}})", E2eSchema()),
               ConfigError);
}

TEST(FScoreTest, OracleAndEmptyParsers) {
  Dataset ds = ParseE2eCorpus(
      "mr,ref\n\"name[Zizzi], eatType[pub]\",Zizzi is a pub .\n"
      "\"name[Cotto], food[French]\",Cotto serves french food .\n",
      E2eSchema());
  std::size_t i = 0;
  std::vector<std::vector<Slot>> gold;
  for (const Example& ex : ds.examples) gold.push_back(ex.mr.slots);
  const ParserScores oracle = ParserFScore([&](const Utterance&) { return gold[i++]; }, ds);
  EXPECT_EQ(oracle.attributes.size(), 3u);
  EXPECT_DOUBLE_EQ(oracle.macro_f, 1.0);
  const ParserScores empty = ParserFScore([](const Utterance&) { return std::vector<Slot>{}; }, ds);
  EXPECT_DOUBLE_EQ(empty.macro_precision, 0.0);
  EXPECT_DOUBLE_EQ(empty.macro_recall, 0.0);
  EXPECT_DOUBLE_EQ(empty.macro_f, 0.0);
}

TEST(FScoreTest, ShippedValidationFixture) {
  const Dataset raw = LoadE2eCorpus(DataPath("e2e/valid.csv"), E2eSchema(), Split::kValid);
  const Dataset ds = NormalizeDataset(
      raw, NormalizationConfig::LoadFile(DataPath("e2e/normalization.json"), E2eSchema()))
                         .dataset;
  const ParserScores sc = ParserFScore(
      [](const Utterance& u) { return EvidenceSlots(RuleParse(u, E2ePack())); }, ds);
  EXPECT_GE(sc.macro_f, 0.90);
  EXPECT_LT(sc.macro_f, 1.0);  // the fixture carries real-world noise
}

}  // namespace
}  // namespace selfgen
