#include <cmath>

#include <gtest/gtest.h>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"
#include "selfgen/eval/bleu.h"

namespace selfgen {
namespace {

TokenSeq T(const char* s) { return Tokenize(s); }

TEST(BleuTest, PerfectMatchIs100) {
  EXPECT_DOUBLE_EQ(CorpusBleu({T("the cat sat on the mat")}, {{T("the cat sat on the mat")}}),
                   100.0);
  EXPECT_DOUBLE_EQ(CorpusBleu({T("a b")}, {{T("a b")}}), 100.0);
}

TEST(BleuTest, DisjointIsZero) {
  EXPECT_EQ(CorpusBleu({T("x y z w")}, {{T("a b c d")}}), 0.0);
}

TEST(BleuTest, ShortHypothesisHandExpansion) {
  // p1 = p2 = p3 = 1, no 4-grams, BP = exp(1 - 4/3).
  const BleuDetail d = CorpusBleuDetail({T("the cat sat")}, {{T("the cat sat down")}});
  EXPECT_NEAR(d.brevity_penalty, std::exp(1.0 - 4.0 / 3.0), 1e-12);
  EXPECT_NEAR(d.score, 71.65, 1e-2);
}

TEST(BleuTest, ClippingAndMultiReferenceHandExpansion) {
  // hyp "the the the the" vs refs {"the cat", "the the dog"}: p1 = 2/4,
  // p2 = 1/3 (max count of "the the" is 1), p3 = 0/2 -> BLEU 0.
  EXPECT_EQ(CorpusBleu({T("the the the the")}, {{T("the cat"), T("the the dog")}}), 0.0);
  // hyp "a b c d e" vs ref "a b c d f": p = 4/5, 3/4, 2/3, 1/2, BP = 1.
  const double expect = 100.0 * std::pow(0.8 * 0.75 * (2.0 / 3.0) * 0.5, 0.25);
  EXPECT_NEAR(CorpusBleu({T("a b c d e")}, {{T("a b c d f")}}), expect, 1e-9);
  EXPECT_NEAR(expect, 66.87, 1e-2);
}

TEST(BleuTest, ClosestReferenceLengthTiesToShorter) {
  const BleuDetail d = CorpusBleuDetail({T("a b c d")}, {{T("a b c"), T("a b c d e")}});
  EXPECT_EQ(d.ref_length, 3u);
}

TEST(BleuTest, OrderInvariantAndErrors) {
  std::vector<TokenSeq> h{T("a b c d e"), T("the cat sat")};
  std::vector<std::vector<TokenSeq>> r{{T("a b c d f")}, {T("the cat sat down")}};
  const double fwd = CorpusBleu(h, r);
  std::swap(h[0], h[1]);
  std::swap(r[0], r[1]);
  EXPECT_DOUBLE_EQ(CorpusBleu(h, r), fwd);
  EXPECT_THROW(CorpusBleu(h, {r[0]}), ContractError);
}

TEST(BleuTest, SmoothingKeepsPartialMatchesPositive) {
  BleuOptions o;
  o.smooth = true;
  EXPECT_GT(CorpusBleu({T("a b x y")}, {{T("a b c d")}}, o), 0.0);
}

TEST(SurfaceStatsTest, CountsWordsAndSentences) {
  EXPECT_EQ(CountWords(T("NAME is a pub .")), 4u);
  EXPECT_EQ(CountSentences(T("NAME is a pub .")), 1u);
  EXPECT_EQ(CountSentences(T("it is a pub . it is cheap .")), 2u);
  EXPECT_EQ(CountSentences(T("no terminal")), 1u);
  const SurfaceStats s = ComputeSurfaceStats(
      {Utterance::FromText("NAME is a pub."), Utterance::FromText("It is. Cheap!")});
  EXPECT_EQ(s.items, 2u);
  EXPECT_NEAR(s.mean_words, (4.0 + 3.0) / 2.0, 1e-12);
  EXPECT_NEAR(s.mean_sentences, 1.5, 1e-12);
  EXPECT_EQ(ComputeSurfaceStats({}).items, 0u);
  EXPECT_EQ(ComputeSurfaceStats({}).mean_words, 0.0);
}

}  // namespace
}  // namespace selfgen
