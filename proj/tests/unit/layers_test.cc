#include <cmath>

#include <gtest/gtest.h>

#include "selfgen/errors.h"
#include "selfgen/neural/grad_check.h"
#include "selfgen/neural/layers.h"

namespace selfgen {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void Randomize(ParamStore& s, std::uint64_t seed, double scale = 0.8) {
  RngStream r(seed);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (double& v : s.at(i).value.values()) v = r.Uniform(-scale, scale);
  }
}

TEST(GruTest, ZeroParamsHalveTheState) {
  ParamStore s;
  const GruParams p = GruParams::Create(s, "g", 3, 2);
  const Vec h = GruCell(Vec{0.3, -0.2, 1.0}, Vec{0.8, -0.4}, p);
  EXPECT_DOUBLE_EQ(h[0], 0.4);
  EXPECT_DOUBLE_EQ(h[1], -0.2);
  const Vec zero = GruCell(Vec{0.3, -0.2, 1.0}, Vec{0.0, 0.0}, p);
  EXPECT_EQ(zero, (Vec{0.0, 0.0}));
}

TEST(GruTest, MatchesGateEquations) {
  ParamStore s;
  const GruParams p = GruParams::Create(s, "g", 2, 2);
  Randomize(s, 3);
  const Vec x{0.5, -1.0}, h{0.25, 0.75};
  const Tensor& W = p.input->value;
  const Tensor& U = p.recurrent_zr->value;
  const Tensor& Uh = p.recurrent_h->value;
  const Tensor& b = p.bias->value;
  double z[2], r[2], expected[2];
  for (int i = 0; i < 2; ++i) {
    z[i] = Sigmoid(W.at(i, 0) * x[0] + W.at(i, 1) * x[1] + U.at(i, 0) * h[0] +
                   U.at(i, 1) * h[1] + b[i]);
    r[i] = Sigmoid(W.at(2 + i, 0) * x[0] + W.at(2 + i, 1) * x[1] + U.at(2 + i, 0) * h[0] +
                   U.at(2 + i, 1) * h[1] + b[2 + i]);
  }
  for (int i = 0; i < 2; ++i) {
    const double cand = std::tanh(W.at(4 + i, 0) * x[0] + W.at(4 + i, 1) * x[1] +
                                  Uh.at(i, 0) * r[0] * h[0] + Uh.at(i, 1) * r[1] * h[1] +
                                  b[4 + i]);
    expected[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
  }
  const Vec got = GruCell(x, h, p);
  EXPECT_NEAR(got[0], expected[0], 1e-12);
  EXPECT_NEAR(got[1], expected[1], 1e-12);
  EXPECT_THROW(GruCell(Vec{1.0}, h, p), DimensionError);
}

TEST(GruTest, TapedCellMatchesPlainAndPassesGradCheck) {
  ParamStore s;
  const GruParams p = GruParams::Create(s, "g", 3, 4);
  s.Add("x", {3});
  s.Add("h", {4});
  Randomize(s, 8);
  Graph g;
  Var out = GruCell(g, g.Param(s.Get("x")), g.Param(s.Get("h")), p);
  const Vec plain = GruCell(s.Get("x").value.values(), s.Get("h").value.values(), p);
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_EQ(g.value(out)[i], plain[i]);

  auto loss = [&](Graph& gg) {
    Var h1 = GruCell(gg, gg.Param(s.Get("x")), gg.Param(s.Get("h")), p);
    Var h2 = GruCell(gg, gg.Param(s.Get("x")), h1, p);
    return gg.CrossEntropy(h2, 1);
  };
  EXPECT_LE(GradCheck(loss, s).max_relative_error, 1e-6);
}

TEST(AttentionTest, SingletonAndIdenticalStates) {
  ParamStore s;
  const AttentionParams p = AttentionParams::Create(s, "a", 3, 4);
  Randomize(s, 4);
  const Vec e{0.1, 0.2, 0.3};
  AttentionResult one = Attend(Vec{1, 0, -1}, {e}, p);
  EXPECT_EQ(one.weights, Vec{1.0});
  EXPECT_EQ(one.context, e);
  AttentionResult same = Attend(Vec{1, 0, -1}, {e, e, e}, p);
  for (double w : same.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(same.context[i], e[i], 1e-15);
  EXPECT_THROW(Attend(Vec{1, 0, -1}, {}, p), DimensionError);
}

TEST(AttentionTest, MatchesBruteForceSoftmax) {
  ParamStore s;
  const AttentionParams p = AttentionParams::Create(s, "a", 3, 5);
  Randomize(s, 12);
  const std::vector<Vec> enc{{0.5, -0.1, 0.2}, {-0.7, 0.3, 0.9}, {0.05, 0.6, -0.4}};
  const Vec d{0.2, -0.3, 0.8};
  long double scores[3], z = 0.0L;
  for (int j = 0; j < 3; ++j) {
    long double sc = 0.0L;
    for (int a = 0; a < 5; ++a) {
      long double u = p.bias->value[a];
      for (int i = 0; i < 3; ++i) {
        u += static_cast<long double>(p.w_enc->value.at(a, i)) * enc[j][i] +
             static_cast<long double>(p.w_dec->value.at(a, i)) * d[i];
      }
      sc += p.v->value[a] * std::tanh(u);
    }
    scores[j] = std::exp(sc);
    z += scores[j];
  }
  const AttentionResult r = Attend(d, enc, p);
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(r.weights[j], static_cast<double>(scores[j] / z), 1e-12);
    EXPECT_GE(r.weights[j], 0.0);
    total += r.weights[j];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (int i = 0; i < 3; ++i) {
    double expect = 0.0;
    for (int j = 0; j < 3; ++j) expect += static_cast<double>(scores[j] / z) * enc[j][i];
    EXPECT_NEAR(r.context[i], expect, 1e-12);
  }
}

TEST(AttentionTest, TapedAttentionPassesGradCheck) {
  ParamStore s;
  const AttentionParams p = AttentionParams::Create(s, "a", 3, 4);
  s.Add("enc", {3, 3});
  s.Add("dec", {3});
  Randomize(s, 21);
  auto loss = [&](Graph& g) {
    std::vector<Var> states;
    for (std::size_t j = 0; j < 3; ++j) states.push_back(g.Row(s.Get("enc"), j));
    const auto keys = AttentionKeys(g, states, p);
    auto [ctx, w] = Attend(g, g.Param(s.Get("dec")), states, keys, p);
    return g.Add(g.CrossEntropy(ctx, 0), g.Dot(w, w));
  };
  EXPECT_LE(GradCheck(loss, s).max_relative_error, 1e-6);
}

TEST(CrossEntropyTest, Oracles) {
  EXPECT_NEAR(CrossEntropyLoss(Vec{0, 0, 0, 0}, 3), 1.386294, 1e-6);
  EXPECT_LT(CrossEntropyLoss(Vec{50, 0, 0, 0}, 0), 1e-20);
  const Vec l{0.3, -1.2, 2.5, 0.0, 1.1};
  long double z = 0.0L;
  for (double v : l) z += std::exp(static_cast<long double>(v));
  const long double expect = -std::log(std::exp(static_cast<long double>(l[2])) / z);
  EXPECT_NEAR(CrossEntropyLoss(l, 2), static_cast<double>(expect), 1e-12);
  EXPECT_THROW(CrossEntropyLoss(l, 5), Error);
}

TEST(DropoutTest, IdentityCasesAndExpectation) {
  RngStream r(5);
  const Tensor t = Tensor::FromVector({1.0, 2.0, 3.0});
  EXPECT_EQ(Dropout(t, 0.0, true, r), t);
  EXPECT_EQ(Dropout(t, 0.5, false, r), t);
  EXPECT_THROW(Dropout(t, 1.0, true, r), ConfigError);
  const Tensor ones(1000000, 1.0);
  const Tensor d = Dropout(ones, 0.25, true, r);
  double sum = 0.0;
  for (double v : d.values()) sum += v;
  EXPECT_GE(sum / d.size(), 0.99);
  EXPECT_LE(sum / d.size(), 1.01);
}

}  // namespace
}  // namespace selfgen
