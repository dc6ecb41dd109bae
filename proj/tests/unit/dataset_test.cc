#include <gtest/gtest.h>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/normalize.h"
#include "selfgen/corpus/vocab.h"
#include "selfgen/errors.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::E2eSchema;

constexpr const char* kThreeRows =
    "mr,ref\n"
    "\"name[The Golden Curry], near[The Six Bells], familyFriendly[yes]\","
    "\"The Golden Curry is family friendly, near The Six Bells.\"\n"
    "\"name[Zizzi], eatType[pub]\",\"Zizzi is a pub.\"\n"
    "\"name[Zizzi], eatType[pub]\",\"Zizzi is a pub.\"\n";

TEST(E2eCorpusTest, ParsesRowsAndKeepsDuplicates) {
  const Dataset ds = ParseE2eCorpus(kThreeRows, E2eSchema(), Split::kValid);
  ASSERT_EQ(ds.examples.size(), 3u);
  EXPECT_EQ(ds.split, Split::kValid);
  const MeaningRepresentation& mr = ds.examples[0].mr;
  EXPECT_EQ(mr.ValueOf("name"), "The Golden Curry");
  EXPECT_EQ(mr.ValueOf("near"), "The Six Bells");
  EXPECT_EQ(mr.ValueOf("familyFriendly"), "yes");
  EXPECT_EQ(ds.examples[1].mr, ds.examples[2].mr);
  EXPECT_EQ(ds.examples[1].refs[0].tokens,
            (std::vector<std::string>{"zizzi", "is", "a", "pub", "."}));
}

TEST(E2eCorpusTest, EmptyInputGivesEmptyDataset) {
  EXPECT_TRUE(ParseE2eCorpus("", E2eSchema()).examples.empty());
}

TEST(E2eCorpusTest, FormatParseRoundTrip) {
  const Dataset ds = ParseE2eCorpus(kThreeRows, E2eSchema());
  const Dataset again = ParseE2eCorpus(FormatE2eCorpus(ds.examples), E2eSchema());
  ASSERT_EQ(again.examples.size(), ds.examples.size());
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    EXPECT_EQ(SerializeMr(again.examples[i].mr), SerializeMr(ds.examples[i].mr));
    EXPECT_EQ(again.examples[i].refs[0].tokens, ds.examples[i].refs[0].tokens);
  }
}

TEST(E2eCorpusTest, MalformedRowReportsLine) {
  try {
    ParseE2eCorpus("mr,ref\n\"name[Zizzi]\",\"ok\"\n\"name[Zizzi\",\"bad\"\n", E2eSchema());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(ParseE2eCorpus("\"name[Zizzi], food[Thai]\",\"x\"\n", E2eSchema()),
               SchemaError);
}

TEST(E2eCorpusTest, GroupByMrMergesReferences) {
  const auto grouped = GroupByMr(ParseE2eCorpus(kThreeRows, E2eSchema()).examples);
  ASSERT_EQ(grouped.size(), 2u);
  EXPECT_EQ(grouped[1].refs.size(), 2u);
}

TEST(DaCorpusTest, ParsesBothRecordShapes) {
  const DomainSchema schema = DomainSchema::LoadFile(testing::DataPath("laptop/schema.json"));
  const Dataset ds = ParseDaCorpus(
      R"J([["inform(name[tecra m50], platform[linux])", "the tecra m50 runs linux ."],
          {"mr": "goodbye()", "refs": ["goodbye .", "bye ."]},
          ["inform_count(count=40;family=dont_care)", "there are 40 laptops in every family ."]])J",
      schema);
  ASSERT_EQ(ds.examples.size(), 3u);
  EXPECT_EQ(ds.examples[1].refs.size(), 2u);
  EXPECT_EQ(ds.examples[2].mr.act, "inform_count");
  EXPECT_EQ(ds.examples[2].mr.ValueOf("family"), "don't care");
}

NormalizationConfig Rules() {
  return NormalizationConfig::FromJsonText(R"({
    "amend": [{"attribute": "eatType", "value": "restaurant", "trigger": "\\brestaurant\\b"}],
    "remap": [{"attribute": "priceRange", "from": "cheap", "to": "less than £20",
               "when": "numeric", "symmetric": true}]})",
                                           E2eSchema());
}

TEST(NormalizeTest, AmendsMissingEatType) {
  Dataset ds = ParseE2eCorpus("\"name[Zizzi]\",\"Zizzi is a restaurant.\"\n", E2eSchema());
  const NormalizationResult r = NormalizeDataset(ds, Rules());
  EXPECT_EQ(r.dataset.examples[0].mr.ValueOf("eatType"), "restaurant");
  ASSERT_EQ(r.edits.size(), 1u);
}

TEST(NormalizeTest, RemapsPriceBothWays) {
  Dataset ds = ParseE2eCorpus(
      "\"name[Zizzi], priceRange[cheap]\",\"Zizzi costs under £20.\"\n"
      "\"name[Cotto], priceRange[less than £20]\",\"Cotto is cheap.\"\n"
      "\"name[Aromi], priceRange[cheap]\",\"Aromi is cheap.\"\n",
      E2eSchema());
  const NormalizationResult r = NormalizeDataset(ds, Rules());
  EXPECT_EQ(r.dataset.examples[0].mr.ValueOf("priceRange"), "less than £20");
  EXPECT_EQ(r.dataset.examples[1].mr.ValueOf("priceRange"), "cheap");
  EXPECT_EQ(r.dataset.examples[2].mr.ValueOf("priceRange"), "cheap");
  EXPECT_EQ(r.edits.size(), 2u);
}

TEST(NormalizeTest, NeverTouchesTestSplit) {
  Dataset ds = ParseE2eCorpus("\"name[Zizzi]\",\"Zizzi is a restaurant.\"\n", E2eSchema(),
                              Split::kTest);
  const NormalizationResult r = NormalizeDataset(ds, Rules());
  EXPECT_TRUE(r.edits.empty());
  EXPECT_EQ(r.dataset.examples[0].mr, ds.examples[0].mr);
}

TEST(NormalizeTest, UnknownAttributeIsConfigError) {
  EXPECT_THROW(NormalizationConfig::FromJsonText(
                   R"({"amend":[{"attribute":"colour","value":"red","trigger":"red"}]})",
                   E2eSchema()),
               ConfigError);
}

TEST(VocabTest, MinimalCorpus) {
  const Vocab out = BuildOutputVocab({{"a", "b"}});
  EXPECT_EQ(out.tokens(), (std::vector<std::string>{"<pad>", "<s>", "</s>", "<unk>", "a", "b"}));
  EXPECT_EQ(out.Index("zzz"), out.unk());
}

TEST(VocabTest, FrequencyThenLexicographicOrder) {
  const Vocab out = BuildOutputVocab({{"b", "c", "c"}, {"a"}});
  EXPECT_EQ(out.Token(4), "c");
  EXPECT_EQ(out.Token(5), "a");
  EXPECT_EQ(out.Token(6), "b");
}

TEST(VocabTest, DeterministicAndCoversInputs) {
  const Dataset ds = ParseE2eCorpus(kThreeRows, E2eSchema());
  for (InputMode mode : {InputMode::kE2eLex, InputMode::kE2eDelex}) {
    const VocabPair a = BuildVocab(ds, mode);
    const VocabPair b = BuildVocab(ds, mode);
    EXPECT_EQ(a.input.ToJsonText(), b.input.ToJsonText());
    EXPECT_EQ(a.output.ToJsonText(), b.output.ToJsonText());
    for (const std::string& t : AllInputTokens(E2eSchema(), mode)) {
      EXPECT_TRUE(a.input.Contains(t)) << t;
    }
    EXPECT_EQ(Vocab::FromJsonText(a.output.ToJsonText()).tokens(), a.output.tokens());
  }
}

}  // namespace
}  // namespace selfgen
