#include <cmath>

#include <gtest/gtest.h>

#include "selfgen/corpus/delex.h"
#include "selfgen/errors.h"
#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/rule_pack.h"
#include "selfgen/mrparse/templates.h"
#include "selfgen/neural/rng.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::DataPath;
using testing::ToySchema;

Dataset Toy(const std::string& split) {
  return LoadE2eCorpus(DataPath("toy/" + split + ".csv"), ToySchema(),
                       split == "train" ? Split::kTrain : Split::kValid);
}

const ClassifierParser& TrainedToy() {
  static const ClassifierParser p =
      ClassifierParser::Train(Toy("train"), Toy("valid"), InputMode::kE2eDelex, {});
  return p;
}

Dataset TwoPhrase() {
  std::string csv = "mr,ref\n";
  const char* names[] = {"Bistro Uno", "Cafe Luna", "The Anchor", "Golden Wok"};
  for (const char* n : names) {
    csv += std::string("\"name[") + n + "], food[italian]\"," + n + " serves italian food .\n";
    csv += std::string("\"name[") + n + "], food[french]\"," + n + " serves french food .\n";
  }
  return ParseE2eCorpus(csv, ToySchema());
}

TEST(ClassifierTest, ArchitectureShapes) {
  const ClassifierParser& p = TrainedToy();
  ASSERT_EQ(p.targets().size(), 3u);  // food, area, price; name is a placeholder
  const ParamStore& ps = p.Find("food")->model.params();
  EXPECT_EQ(ps.Get("food.embed").value.cols(), 50u);
  EXPECT_EQ(ps.Get("food.conv1.weight").value.shape(), (std::vector<std::size_t>{50, 50}));
  EXPECT_EQ(ps.Get("food.conv2.weight").value.shape(), (std::vector<std::size_t>{50, 100}));
  EXPECT_EQ(ps.Get("food.conv3.weight").value.shape(), (std::vector<std::size_t>{50, 150}));
  EXPECT_EQ(ps.Get("food.hidden.weight").value.shape(), (std::vector<std::size_t>{50, 150}));
  EXPECT_EQ(ps.Get("food.out.weight").value.rows(), 5u);  // 4 values + n/a
  EXPECT_EQ(p.Find("food")->classes.back(), "n/a");
}

TEST(ClassifierTest, UntrainedIsNearUniform) {
  ClassifierConfig cfg;
  cfg.epochs = 0;
  const ClassifierParser p =
      ClassifierParser::Train(Toy("train"), Toy("valid"), InputMode::kE2eDelex, cfg);
  for (const ClassifierTarget& t : p.targets()) {
    const Vec probs = t.model.Probabilities(p.EncodeTokens({"NAME", "serves", "food", "."}));
    double total = 0.0;
    for (double q : probs) {
      total += q;
      const double c = 1.0 / probs.size();
      EXPECT_GT(q, c / 5.0);
      EXPECT_LT(q, c * 5.0);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ClassifierTest, SeparableTwoPhraseCorpus) {
  const Dataset ds = TwoPhrase();
  std::vector<ClassifierEpoch> log;
  const ClassifierParser p = ClassifierParser::Train(ds, ds, InputMode::kE2eDelex, {}, &log);
  const ClassifierTarget* food = p.Find("food");
  ASSERT_NE(food, nullptr);
  EXPECT_DOUBLE_EQ(food->best_f1, 1.0);
  EXPECT_LE(food->best_epoch, 30u);
  // area and price never occur: constant n/a classifiers.
  ASSERT_TRUE(p.Find("area")->constant.has_value());
  EXPECT_EQ(p.Find("area")->classes[*p.Find("area")->constant], "n/a");
}

TEST(ClassifierTest, ToyFixtureReachesHighF1) {
  for (const ClassifierTarget& t : TrainedToy().targets()) {
    EXPECT_GE(t.best_f1, 0.95) << t.name;
  }
}

TEST(ClassifierTest, NameOnlyUtterance) {
  const DelexMapping b{{"NAME", "name", "Cafe Luna"}};
  const ParseOutcome p = ClfParse(Utterance::FromText("NAME is a place to eat ."), TrainedToy(),
                                  0.5, &b);
  ASSERT_TRUE(p.valid) << p.reason;
  EXPECT_EQ(SerializeMr(*p.mr), "inform(name[Cafe Luna])");
}

TEST(ClassifierTest, ThresholdBoundary) {
  ClassifierParser p = TrainedToy();
  // Force the food head to output 0.49 on its top class.
  ClassifierTarget& food = p.targets()[0];
  ASSERT_EQ(food.name, "food");
  Parameter& w = food.model.params().Get("food.out.weight");
  Parameter& bias = food.model.params().Get("food.out.bias");
  w.value.Fill(0.0);
  const std::vector<double> probs{0.49, 0.2, 0.15, 0.1, 0.06};
  for (std::size_t i = 0; i < probs.size(); ++i) bias.value[i] = std::log(probs[i]);
  const DelexMapping b{{"NAME", "name", "Cafe Luna"}};
  const Utterance u = Utterance::FromText("NAME serves italian food .");
  const ParseOutcome low = ClfParse(u, p, 0.5, &b);
  EXPECT_FALSE(low.valid);
  EXPECT_FALSE(low.mr.has_value());
  ASSERT_NE(low.Evidence("food"), nullptr);
  EXPECT_NEAR(low.Evidence("food")->confidence, 0.49, 1e-12);
  EXPECT_TRUE(ClfParse(u, p, 0.0, &b).valid);
}

TEST(ClassifierTest, ZeroThresholdNeverDiscards) {
  const DelexMapping b{{"NAME", "name", "Cafe Luna"}};
  for (const std::string text : {"NAME .", "NAME french north cheap italian", "NAME is good",
                                 "NAME serves chinese food in the south , cheap ."}) {
    EXPECT_TRUE(ClfParse(Utterance::FromText(text), TrainedToy(), 0.0, &b).valid) << text;
  }
}

TEST(ClassifierTest, SaveLoadRoundTrip) {
  const auto path = testing::TempPath("clf.sgt").string();
  TrainedToy().Save(path);
  const ClassifierParser q = ClassifierParser::Load(path);
  ASSERT_EQ(q.targets().size(), TrainedToy().targets().size());
  const auto ids = TrainedToy().EncodeTokens({"NAME", "is", "cheap", "."});
  for (std::size_t t = 0; t < q.targets().size(); ++t) {
    EXPECT_TRUE(q.targets()[t].model.params().BitIdentical(
        TrainedToy().targets()[t].model.params()));
    EXPECT_EQ(q.targets()[t].model.Probabilities(ids),
              TrainedToy().targets()[t].model.Probabilities(ids));
  }
  EXPECT_EQ(q.vocab(), TrainedToy().vocab());
}

TEST(ClassifierTest, AgreesWithRuleParserOnTemplates) {
  const RulePack pack = RulePack::LoadFile(DataPath("toy/rules.txt"), ToySchema());
  const TemplateSet templates = TemplateSet::LoadFile(DataPath("toy/templates.json"), ToySchema());
  RngStream rng(99);
  std::size_t agree = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    MeaningRepresentation mr{"inform", {}};
    for (const AttributeDef& a : ToySchema().attributes()) {
      if (a.name != "name" && rng.Uniform() < 0.5) continue;
      mr.slots.push_back({a.name, a.values[rng.Below(a.values.size())]});
    }
    auto [utt, b] = Delexicalize(templates.Expand(mr), mr, ToySchema(), {"name"});
    const ParseOutcome r = RuleParse(utt, pack, &b);
    const ParseOutcome c = ClfParse(utt, TrainedToy(), 0.5, &b);
    for (const AttributeDef& a : ToySchema().attributes()) {
      const AttributeEvidence* er = r.Evidence(a.name);
      const AttributeEvidence* ec = c.Evidence(a.name);
      const std::string vr = er ? er->values[0] : "n/a";
      const std::string vc = ec ? ec->values[0] : "n/a";
      agree += vr == vc;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree) / total, 0.95);
}

TEST(ClassifierTest, DialogueActHead) {
  const DomainSchema& s = testing::LaptopSchema();
  const Dataset train = LoadDaCorpus(DataPath("laptop/train.json"), s);
  const Dataset valid = LoadDaCorpus(DataPath("laptop/valid.json"), s, Split::kValid);
  ClassifierConfig cfg;
  cfg.epochs = 10;
  const ClassifierParser p = ClassifierParser::Train(train, valid, InputMode::kDaVariable, cfg);
  ASSERT_NE(p.Find("@act"), nullptr);
  EXPECT_EQ(p.Find("@act")->classes.size(), s.acts().size());
  EXPECT_EQ(p.Find("name"), nullptr);
  EXPECT_NE(p.Find("platform"), nullptr);
}

TEST(ClassifierTest, MacroF1) {
  EXPECT_DOUBLE_EQ(MacroF1({0, 1, 1}, {0, 1, 1}), 1.0);
  // class 0: tp1 fp0 fn0 -> 1; class 1: tp1 fn1 -> 2/3; class 2: fp1 -> 0
  EXPECT_NEAR(MacroF1({0, 1, 1}, {0, 1, 2}), (1.0 + 2.0 / 3.0 + 0.0) / 3.0, 1e-12);
  EXPECT_THROW(MacroF1({0}, {}), ContractError);
  ClassifierConfig bad;
  bad.widths = {};
  EXPECT_THROW(bad.Validate(), ConfigError);
}

}  // namespace
}  // namespace selfgen
