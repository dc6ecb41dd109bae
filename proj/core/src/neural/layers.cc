#include "selfgen/neural/layers.h"

#include <algorithm>
#include <cmath>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

double SigmoidScalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

GruParams GruParams::Create(ParamStore& store, const std::string& prefix,
                            std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  p.input = &store.Add(prefix + ".input", {3 * hidden_dim, input_dim});
  p.recurrent_zr = &store.Add(prefix + ".recurrent_zr", {2 * hidden_dim, hidden_dim});
  p.recurrent_h = &store.Add(prefix + ".recurrent_h", {hidden_dim, hidden_dim});
  p.bias = &store.Add(prefix + ".bias", {3 * hidden_dim}, ParamRole::kBias);
  return p;
}

GruParams GruParams::Bind(ParamStore& store, const std::string& prefix) {
  return {&store.Get(prefix + ".input"), &store.Get(prefix + ".recurrent_zr"),
          &store.Get(prefix + ".recurrent_h"), &store.Get(prefix + ".bias")};
}

AttentionParams AttentionParams::Create(ParamStore& store, const std::string& prefix,
                                        std::size_t hidden_dim, std::size_t attn_dim) {
  AttentionParams p;
  p.w_enc = &store.Add(prefix + ".w_enc", {attn_dim, hidden_dim});
  p.w_dec = &store.Add(prefix + ".w_dec", {attn_dim, hidden_dim});
  p.bias = &store.Add(prefix + ".bias", {attn_dim}, ParamRole::kBias);
  p.v = &store.Add(prefix + ".v", {attn_dim});
  return p;
}

AttentionParams AttentionParams::Bind(ParamStore& store, const std::string& prefix) {
  return {&store.Get(prefix + ".w_enc"), &store.Get(prefix + ".w_dec"),
          &store.Get(prefix + ".bias"), &store.Get(prefix + ".v")};
}

Vec MatVec(const Tensor& w, std::span<const double> x) {
  if (w.rank() != 2 || w.cols() != x.size()) {
    throw DimensionError("matvec: " + ShapeString(w.shape()) + " times vector of " +
                         std::to_string(x.size()));
  }
  Vec out(w.rows());
  const std::size_t cols = w.cols();
  const double* wd = w.storage().data();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* row = wd + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

Vec GruCell(std::span<const double> x, std::span<const double> h,
            const GruParams& p) {
  const std::size_t hd = p.hidden_dim();
  if (h.size() != hd || x.size() != p.input_dim()) {
    throw DimensionError("gru: input " + std::to_string(x.size()) + "/state " +
                         std::to_string(h.size()) + " vs params " +
                         std::to_string(p.input_dim()) + "/" + std::to_string(hd));
  }
  Vec wx = MatVec(p.input->value, x);
  const Tensor& b = p.bias->value;
  for (std::size_t i = 0; i < wx.size(); ++i) wx[i] += b[i];
  const Vec uh = MatVec(p.recurrent_zr->value, h);
  Vec z(hd), rh(hd);
  for (std::size_t i = 0; i < hd; ++i) {
    z[i] = SigmoidScalar(wx[i] + uh[i]);
    const double r = SigmoidScalar(wx[hd + i] + uh[hd + i]);
    rh[i] = r * h[i];
  }
  const Vec uc = MatVec(p.recurrent_h->value, rh);
  Vec out(hd);
  for (std::size_t i = 0; i < hd; ++i) {
    const double cand = std::tanh(wx[2 * hd + i] + uc[i]);
    out[i] = h[i] + z[i] * (cand - h[i]);
  }
  return out;
}

std::vector<Vec> AttentionKeys(const std::vector<Vec>& encoder_states,
                               const AttentionParams& p) {
  std::vector<Vec> keys;
  keys.reserve(encoder_states.size());
  for (const Vec& e : encoder_states) keys.push_back(MatVec(p.w_enc->value, e));
  return keys;
}

AttentionResult Attend(std::span<const double> decoder_state,
                       const std::vector<Vec>& encoder_states,
                       const std::vector<Vec>& keys, const AttentionParams& p) {
  if (encoder_states.empty()) throw DimensionError("attention over empty sequence");
  Vec q = MatVec(p.w_dec->value, decoder_state);
  const Tensor& b = p.bias->value;
  for (std::size_t a = 0; a < q.size(); ++a) q[a] += b[a];
  const Tensor& v = p.v->value;
  Vec scores(encoder_states.size());
  for (std::size_t j = 0; j < encoder_states.size(); ++j) {
    double s = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a) s += v[a] * std::tanh(keys[j][a] + q[a]);
    scores[j] = s;
  }
  AttentionResult out;
  out.weights = SoftmaxVec(scores);
  out.context.assign(encoder_states[0].size(), 0.0);
  for (std::size_t j = 0; j < encoder_states.size(); ++j) {
    for (std::size_t i = 0; i < out.context.size(); ++i) {
      out.context[i] += out.weights[j] * encoder_states[j][i];
    }
  }
  return out;
}

AttentionResult Attend(std::span<const double> decoder_state,
                       const std::vector<Vec>& encoder_states,
                       const AttentionParams& p) {
  if (encoder_states.empty()) throw DimensionError("attention over empty sequence");
  return Attend(decoder_state, encoder_states, AttentionKeys(encoder_states, p), p);
}

Vec SoftmaxVec(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax of empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

Vec LogSoftmaxVec(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("log softmax of empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double lz = std::log(z);
  Vec out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - mx - lz;
  return out;
}

double CrossEntropyLoss(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw DimensionError("cross entropy target " + std::to_string(target) +
                         " out of range for " + std::to_string(logits.size()) +
                         " logits");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return -(logits[target] - mx - std::log(z));
}

Tensor Dropout(const Tensor& t, double rate, bool training, RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return t;
  Tensor out = t;
  const double keep = 1.0 / (1.0 - rate);
  for (double& v : out.values()) v = rng.Uniform() < rate ? 0.0 : v * keep;
  return out;
}

Var GruCell(Graph& g, Var x, Var h, const GruParams& p) {
  const std::size_t hd = p.hidden_dim();
  if (g.value(h).size() != hd || g.value(x).size() != p.input_dim()) {
    throw DimensionError("gru: input/state dimension mismatch");
  }
  Var wx = g.Add(g.MatVec(g.Param(*p.input), x), g.Param(*p.bias));
  Var uh = g.MatVec(g.Param(*p.recurrent_zr), h);
  Var z = g.Sigmoid(g.Add(g.Slice(wx, 0, hd), g.Slice(uh, 0, hd)));
  Var r = g.Sigmoid(g.Add(g.Slice(wx, hd, hd), g.Slice(uh, hd, hd)));
  Var uc = g.MatVec(g.Param(*p.recurrent_h), g.Mul(r, h));
  Var cand = g.Tanh(g.Add(g.Slice(wx, 2 * hd, hd), uc));
  return g.Add(h, g.Mul(z, g.Sub(cand, h)));
}

std::vector<Var> AttentionKeys(Graph& g, const std::vector<Var>& encoder_states,
                               const AttentionParams& p) {
  std::vector<Var> keys;
  Var w = g.Param(*p.w_enc);
  for (Var e : encoder_states) keys.push_back(g.MatVec(w, e));
  return keys;
}

std::pair<Var, Var> Attend(Graph& g, Var decoder_state,
                           const std::vector<Var>& encoder_states,
                           const std::vector<Var>& keys, const AttentionParams& p) {
  if (encoder_states.empty()) throw DimensionError("attention over empty sequence");
  Var q = g.Add(g.MatVec(g.Param(*p.w_dec), decoder_state), g.Param(*p.bias));
  Var v = g.Param(*p.v);
  std::vector<Var> scores;
  for (Var k : keys) scores.push_back(g.Dot(v, g.Tanh(g.Add(k, q))));
  Var weights = g.Softmax(g.Concat(scores));
  return {g.WeightedSum(weights, encoder_states), weights};
}

}  // namespace selfgen
