#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "selfgen/neural/grad_check.h"
#include "selfgen/seq2seq/model.h"
#include "model_fixture.h"

namespace selfgen {
namespace {

using testing::E2eSchema;
using testing::RandomE2eMr;
using testing::SmallE2eModel;

LinearizedInput Input(const std::string& mr) {
  return Linearize(ParseMr(mr, E2eSchema()), E2eSchema(), InputMode::kE2eDelex);
}

TEST(ModelTest, ConfigInvariants) {
  ModelConfig c;
  EXPECT_EQ(c.embed_dim, 512u);
  EXPECT_EQ(c.hidden_dim, 512u);
  EXPECT_EQ(c.dropout, 0.25);
  c.layers = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
  c.layers = 2;
  c.hidden_dim = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(ModelTest, EncodeShapeDeterminismAndOrderSensitivity) {
  const Seq2SeqModel m = SmallE2eModel(16, 1);
  const LinearizedInput x = Input("name[Zizzi], food[Italian], area[riverside]");
  ASSERT_EQ(x.tokens.size(), 7u);
  const EncoderOutput a = m.Encode(x);
  EXPECT_EQ(a.states.size(), 7u);
  for (const Vec& s : a.states) EXPECT_EQ(s.size(), 16u);
  EXPECT_EQ(m.Encode(x).states, a.states);

  LinearizedInput swapped = x;
  std::swap(swapped.tokens[0], swapped.tokens[2]);
  EXPECT_NE(m.Encode(swapped).states, a.states);

  LinearizedInput oov = x;
  oov.tokens[0] = "no_such_token";
  EXPECT_THROW(m.Encode(oov), Error);
}

TEST(ModelTest, DecoderStepNoiseContract) {
  const Seq2SeqModel m = SmallE2eModel(12, 2);
  const EncoderOutput enc = m.Encode(Input("name[Zizzi], eatType[pub]"));
  const DecoderState s0 = m.InitialState(enc);
  const StepOutput clean = m.DecoderStep(m.output_vocab().bos(), s0, enc);
  EXPECT_EQ(clean.logits.size(), m.output_vocab().size());

  const Vec zero(12, 0.0);
  EXPECT_EQ(m.DecoderStep(m.output_vocab().bos(), s0, enc, &zero).logits, clean.logits);

  // Oracle: recompute attention and projection from the perturbed top state.
  RngStream r(4);
  Vec eps(12);
  for (double& e : eps) e = r.Normal();
  const StepOutput noisy = m.DecoderStep(m.output_vocab().bos(), s0, enc, &eps);
  Vec top = clean.next.layers.back();
  for (std::size_t i = 0; i < top.size(); ++i) top[i] += eps[i];
  EXPECT_EQ(noisy.next.layers.back(), top);
  Seq2SeqModel copy = m;
  const AttentionResult att =
      Attend(top, enc.states, AttentionParams::Bind(copy.params(), "attention"));
  Vec joint = top;
  joint.insert(joint.end(), att.context.begin(), att.context.end());
  const Vec proj = MatVec(m.params().Get("output.weight").value, joint);
  for (std::size_t v = 0; v < proj.size(); ++v) {
    EXPECT_NEAR(noisy.logits[v], proj[v] + m.params().Get("output.bias").value[v], 1e-12);
  }
}

TEST(ModelTest, UntrainedLossIsNearUniform) {
  const Seq2SeqModel m = SmallE2eModel(32, 3, 0.05);
  const auto in = m.EncodeInputTokens(Input("name[Zizzi], food[French]"));
  const auto target = m.EncodeTarget({"NAME", "serves", "italian", "food", "."});
  const double expected = (target.size() + 1) * std::log(double(m.output_vocab().size()));
  EXPECT_NEAR(m.SequenceNll(in, target), expected, 0.05 * expected);
}

TEST(ModelTest, SequenceNllIsSumOfStepCrossEntropies) {
  const Seq2SeqModel m = SmallE2eModel(10, 5);
  const auto in = m.EncodeInputTokens(Input("name[Zizzi], near[Avalon]"));
  const auto target = m.EncodeTarget({"NAME", "is", "near", "NEAR", "."});
  const EncoderOutput enc = m.Encode(in);
  DecoderState s = m.InitialState(enc);
  std::size_t prev = m.output_vocab().bos();
  double sum = 0.0;
  std::vector<std::size_t> full = target;
  full.push_back(m.output_vocab().eos());
  for (std::size_t t : full) {
    StepOutput step = m.DecoderStep(prev, s, enc);
    sum += CrossEntropyLoss(step.logits, t);
    s = step.next;
    prev = t;
  }
  EXPECT_NEAR(m.SequenceNll(in, target), sum, 1e-12);
  EXPECT_THROW(m.SequenceNll(in, {}), ContractError);
}

TEST(ModelTest, TapedLossMatchesPlainInEvalMode) {
  Seq2SeqModel m = SmallE2eModel(8, 6);
  const auto in = m.EncodeInputTokens(Input("name[Zizzi], food[Italian]"));
  const auto target = m.EncodeTarget({"NAME", "serves", "italian", "food", "."});
  Graph g;
  RngStream r(1);
  const Var loss = m.SequenceLoss(g, in, target, false, r);
  EXPECT_NEAR(g.scalar(loss), m.SequenceNll(in, target), 1e-10);
}

TEST(ModelTest, SequenceLossPassesGradCheck) {
  Seq2SeqModel m = SmallE2eModel(8, 7);
  const auto in = m.EncodeInputTokens(Input("name[Zizzi], near[Avalon], food[Italian]"));
  const auto target = m.EncodeTarget({"NAME", "serves", "italian", "food", "near", "NEAR"});
  auto loss = [&](Graph& g) {
    RngStream r(1);
    return m.SequenceLoss(g, in, target, false, r);
  };
  GradCheckOptions opts;
  opts.max_coordinates = 600;
  const GradCheckResult res = GradCheck(loss, m.params(), opts);
  EXPECT_LE(res.max_relative_error, 1e-4)
      << res.worst_parameter << " analytic " << res.worst_analytic << " numeric "
      << res.worst_numeric;
}

TEST(ModelTest, CheckpointRoundTrip) {
  const Seq2SeqModel m = SmallE2eModel(12, 8);
  const std::string path = testing::TempPath("model.ckpt").string();
  m.Save(path);
  const Seq2SeqModel back = Seq2SeqModel::Load(path);
  EXPECT_TRUE(back.params().BitIdentical(m.params()));
  EXPECT_EQ(back.output_vocab().tokens(), m.output_vocab().tokens());
  EXPECT_EQ(back.mode(), m.mode());
  RngStream r(3);
  for (int i = 0; i < 100; ++i) {
    const LinearizedInput x = Linearize(RandomE2eMr(r), E2eSchema(), InputMode::kE2eDelex);
    EXPECT_EQ(Greedy(back, x).ids, Greedy(m, x).ids);
  }

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  bytes[12] ^= 0x01;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  EXPECT_THROW(Seq2SeqModel::Load(path), CheckpointError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace selfgen
