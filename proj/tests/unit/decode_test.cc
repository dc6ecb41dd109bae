#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "model_fixture.h"

namespace selfgen {
namespace {

using testing::E2eSchema;
using testing::RandomE2eMr;
using testing::SmallE2eModel;

LinearizedInput RandomInput(RngStream& r) {
  return Linearize(RandomE2eMr(r), E2eSchema(), InputMode::kE2eDelex);
}

// Chain model over outputs {a, b}: the decoder state is tanh(tanh(3 e_prev))
// and the projection points BOS -> a -> b -> EOS.
Seq2SeqModel ChainModel() {
  ModelConfig cfg;
  cfg.embed_dim = 6;
  cfg.hidden_dim = 6;
  cfg.max_decode_length = 10;
  Seq2SeqModel m(cfg, Vocab({"<pad>", "<unk>", "x"}),
                 Vocab({"<pad>", "<s>", "</s>", "<unk>", "a", "b"}), InputMode::kDaVariable);
  ParamStore& p = m.params();
  for (std::size_t i = 0; i < p.size(); ++i) p.at(i).value.Fill(0.0);
  for (std::size_t i = 0; i < 6; ++i) p.Get("decoder.embed").value.at(i, i) = 3.0;
  for (const char* layer : {"decoder.gru0", "decoder.gru1"}) {
    Tensor& w = p.Get(std::string(layer) + ".input").value;
    Tensor& b = p.Get(std::string(layer) + ".bias").value;
    for (std::size_t i = 0; i < 6; ++i) {
      w.at(12 + i, i) = 1.0;  // candidate block
      b[i] = 40.0;            // update gate saturated at 1
    }
  }
  Tensor& out = p.Get("output.weight").value;
  out.at(4, 1) = 10.0;  // <s> -> a
  out.at(5, 4) = 10.0;  // a -> b
  out.at(2, 5) = 10.0;  // b -> </s>
  return m;
}

TEST(GreedyTest, FollowsHandBuiltArgmaxChain) {
  const Seq2SeqModel m = ChainModel();
  const DecodedSample s = Greedy(m, LinearizedInput{{"x"}});
  EXPECT_EQ(s.tokens, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.ids, (std::vector<std::size_t>{4, 5, 2}));
  EXPECT_TRUE(s.terminated);
  // Step logit of the chosen token is 10 tanh(tanh(3)); the rest are 0, and
  // PAD/BOS are excluded from the normalizer.
  const double top = 10.0 * std::tanh(std::tanh(3.0));
  const double lp = top - std::log(std::exp(top) + 3.0);
  for (double l : s.token_logprobs) EXPECT_NEAR(l, lp, 1e-9);
  EXPECT_NEAR(s.avg_ll, lp, 1e-9);
}

TEST(GreedyTest, EqualsBeamOfWidthOne) {
  const Seq2SeqModel m = SmallE2eModel(16, 11);
  RngStream r(5);
  for (int i = 0; i < 100; ++i) {
    const LinearizedInput x = RandomInput(r);
    const DecodedSample g = Greedy(m, x);
    const auto b = Beam(m, x, 1);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].ids, g.ids);
    EXPECT_EQ(Greedy(m, x).ids, g.ids);
  }
}

TEST(GreedyTest, InvariantsOnRandomModel) {
  const Seq2SeqModel m = SmallE2eModel(16, 12);
  RngStream r(6);
  for (int i = 0; i < 20; ++i) {
    const DecodedSample s = Greedy(m, RandomInput(r));
    EXPECT_LE(s.ids.size(), m.config().max_decode_length);
    for (double lp : s.token_logprobs) EXPECT_LE(lp, 0.0);
    for (std::size_t id : s.ids) {
      EXPECT_NE(id, m.output_vocab().pad());
      EXPECT_NE(id, m.output_vocab().bos());
    }
  }
}

// Tiny model with four emittable tokens (EOS, UNK, a, b) and max length 3.
Seq2SeqModel TinyModel(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.embed_dim = 6;
  cfg.hidden_dim = 6;
  cfg.init_scale = 1.0;
  cfg.max_decode_length = 3;
  Seq2SeqModel m(cfg, Vocab({"<pad>", "<unk>", "x", "y"}),
                 Vocab({"<pad>", "<s>", "</s>", "<unk>", "a", "b"}), InputMode::kDaVariable);
  m.Initialize(seed);
  return m;
}

double AvgLl(const Seq2SeqModel& m, const EncoderOutput& enc,
             const std::vector<std::size_t>& ids) {
  DecoderState s = m.InitialState(enc);
  std::size_t prev = m.output_vocab().bos();
  double sum = 0.0;
  for (std::size_t id : ids) {
    StepOutput step = m.DecoderStep(prev, s, enc);
    sum += DecodeLogProbs(m, step.logits)[id];
    s = step.next;
    prev = id;
  }
  return sum / ids.size();
}

TEST(BeamTest, WideBeamFindsExhaustiveArgmax) {
  const std::vector<std::size_t> emit{2, 3, 4, 5};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Seq2SeqModel m = TinyModel(seed);
    const LinearizedInput x{{"x", "y", "x"}};
    const EncoderOutput enc = m.Encode(x);
    std::vector<std::vector<std::size_t>> all;
    for (std::size_t a : emit) {
      if (a == 2) { all.push_back({a}); continue; }
      for (std::size_t b : emit) {
        if (b == 2) { all.push_back({a, b}); continue; }
        for (std::size_t c : emit) all.push_back({a, b, c});
      }
    }
    double best = -INFINITY;
    std::vector<std::size_t> arg;
    for (const auto& seq : all) {
      const double s = AvgLl(m, enc, seq);
      if (s > best) {
        best = s;
        arg = seq;
      }
    }
    const auto beam = Beam(m, x, 64);
    ASSERT_FALSE(beam.empty());
    EXPECT_EQ(beam[0].ids, arg) << "seed " << seed;
    EXPECT_NEAR(beam[0].avg_ll, best, 1e-12);
    for (std::size_t i = 1; i < beam.size(); ++i) EXPECT_LE(beam[i].avg_ll, beam[i - 1].avg_ll);
    EXPECT_GE(beam[0].avg_ll, Greedy(m, x).avg_ll);
  }
}

TEST(AncestralTest, TinyTemperatureIsGreedyAndSeedsReproduce) {
  const Seq2SeqModel m = SmallE2eModel(16, 13);
  RngStream r(7);
  const LinearizedInput x = RandomInput(r);
  RngStream a(1), b(1), c(1);
  EXPECT_EQ(AncestralSample(m, x, 1e-9, a).ids, Greedy(m, x).ids);
  EXPECT_EQ(AncestralSample(m, x, 1.0, b).ids, AncestralSample(m, x, 1.0, c).ids);
  EXPECT_THROW(AncestralSample(m, x, 0.0, a), ContractError);
}

TEST(AncestralTest, FirstTokenFrequenciesMatchSoftmax) {
  Seq2SeqModel m = TinyModel(3);
  ModelConfig one = m.config();
  const LinearizedInput x{{"y"}};
  const EncoderOutput enc = m.Encode(x);
  const Vec lp = DecodeLogProbs(m, m.DecoderStep(m.output_vocab().bos(),
                                                 m.InitialState(enc), enc).logits);
  const int n = 100000;
  std::vector<int> counts(lp.size(), 0);
  RngStream r(99);
  for (int i = 0; i < n; ++i) ++counts[AncestralSample(m, x, 1.0, r).ids[0]];
  for (std::size_t v = 0; v < lp.size(); ++v) {
    const double p = std::exp(lp[v]);
    const double sd = std::sqrt(n * p * (1 - p));
    EXPECT_LE(std::abs(counts[v] - n * p), 3 * sd + 1e-9) << v;
  }
  (void)one;
}

TEST(NoiseTest, ZeroSigmaIsGreedy) {
  const Seq2SeqModel m = SmallE2eModel(16, 14);
  RngStream r(8);
  for (int i = 0; i < 30; ++i) {
    const LinearizedInput x = RandomInput(r);
    RngStream n(i);
    const DecodedSample s = NoiseInjectSample(m, x, NoiseSpec{0.0, false}, n);
    const DecodedSample g = Greedy(m, x);
    EXPECT_EQ(s.ids, g.ids);
    EXPECT_EQ(s.token_logprobs, g.token_logprobs);
  }
}

TEST(NoiseTest, ScheduleVariance) {
  RngStream r(2024);
  const double sigma0 = 1.0;
  for (std::size_t step : {1u, 2u, 10u}) {
    const Vec eps = DrawNoise(sigma0, step, 100000, r);
    double sum = 0.0, sq = 0.0;
    for (double e : eps) {
      sum += e;
      sq += e * e;
    }
    const double mean = sum / eps.size();
    const double var = sq / eps.size() - mean * mean;
    EXPECT_NEAR(var, sigma0 * sigma0 / step, 0.02 * sigma0 * sigma0 / step) << step;
  }
  EXPECT_THROW(DrawNoise(1.0, 0, 3, r), ContractError);
}

TEST(NoiseTest, CleanRescoringUsesUnperturbedModel) {
  const Seq2SeqModel m = SmallE2eModel(16, 15);
  RngStream r(9);
  const LinearizedInput x = RandomInput(r);
  RngStream a(5), b(5);
  const DecodedSample noisy = NoiseInjectSample(m, x, NoiseSpec{2.0, false}, a);
  const DecodedSample clean = NoiseInjectSample(m, x, NoiseSpec{2.0, true}, b);
  EXPECT_EQ(noisy.ids, clean.ids);
  EXPECT_NEAR(clean.avg_ll, AvgLl(m, m.Encode(x), clean.ids), 1e-12);
}

TEST(SampleBatchTest, KeepsTopKAndDeduplicates) {
  const Seq2SeqModel m = SmallE2eModel(16, 16);
  RngStream r(10);
  const LinearizedInput x = RandomInput(r);
  SeenSet seen;
  const SampleBatch b = SampleBatchTopK(m, x, NoiseSpec{1.0, false}, 77, 200, 20, seen);
  ASSERT_EQ(b.draws.size(), 200u);
  EXPECT_EQ(b.retained_topk, 20u);
  EXPECT_EQ(b.kept.size() + b.deduped, 20u);

  std::vector<double> all;
  for (const auto& d : b.draws) all.push_back(d.avg_ll);
  std::sort(all.rbegin(), all.rend());
  const double cutoff = all[19];
  std::set<std::string> surfaces;
  for (const auto& k : b.kept) {
    EXPECT_GE(k.avg_ll, cutoff);
    EXPECT_TRUE(surfaces.insert(k.Surface()).second);
    EXPECT_TRUE(seen.Contains(k.Surface()));
  }
  for (std::size_t i = 1; i < b.kept.size(); ++i) {
    EXPECT_LE(b.kept[i].avg_ll, b.kept[i - 1].avg_ll);
  }

  // A second batch from the same seed is fully deduplicated.
  const SampleBatch again = SampleBatchTopK(m, x, NoiseSpec{1.0, false}, 77, 200, 20, seen);
  EXPECT_TRUE(again.kept.empty());
}

TEST(SampleBatchTest, WorkerCountDoesNotChangeResults) {
  const Seq2SeqModel m = SmallE2eModel(16, 17);
  RngStream r(11);
  const LinearizedInput x = RandomInput(r);
  SeenSet s1, s4;
  const SampleBatch one = SampleBatchTopK(m, x, NoiseSpec{1.0, false}, 3, 40, 10, s1, 1);
  const SampleBatch four = SampleBatchTopK(m, x, NoiseSpec{1.0, false}, 3, 40, 10, s4, 4);
  ASSERT_EQ(one.kept.size(), four.kept.size());
  for (std::size_t i = 0; i < one.kept.size(); ++i) {
    EXPECT_EQ(one.kept[i].ids, four.kept[i].ids);
    EXPECT_EQ(one.kept[i].avg_ll, four.kept[i].avg_ll);
  }
}

TEST(SampleBatchTest, KAtLeastNReturnsAllUnique) {
  const Seq2SeqModel m = SmallE2eModel(16, 18);
  RngStream r(12);
  SeenSet seen;
  const SampleBatch b =
      SampleBatchTopK(m, RandomInput(r), NoiseSpec{1.0, false}, 1, 15, 50, seen);
  std::set<std::string> unique;
  for (const auto& d : b.draws) unique.insert(d.Surface());
  EXPECT_EQ(b.kept.size(), unique.size());
}

TEST(SampleDumpTest, LineHasAllFields) {
  DecodedSample s;
  s.avg_ll = -0.5;
  s.sample_index = 3;
  const std::string line = SampleDumpLine("inform(name[Zizzi])", "NAME is here .", s, 1.0, 9);
  for (const char* key : {"\"mr\"", "\"text\"", "\"avg_ll\"", "\"sigma0\"", "\"seed\""}) {
    EXPECT_NE(line.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace selfgen
