#ifndef SELFGEN_NEURAL_LAYERS_H_
#define SELFGEN_NEURAL_LAYERS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selfgen/neural/graph.h"
#include "selfgen/neural/param_store.h"
#include "selfgen/neural/rng.h"
#include "selfgen/neural/tensor.h"

namespace selfgen {

using Vec = std::vector<double>;

// GRU parameters with the three gates stacked as [update; reset; candidate]:
//   input   [3H x I], recurrent_zr [2H x H], recurrent_h [H x H], bias [3H].
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   h~ = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * h~
struct GruParams {
  Parameter* input = nullptr;
  Parameter* recurrent_zr = nullptr;
  Parameter* recurrent_h = nullptr;
  Parameter* bias = nullptr;

  static GruParams Create(ParamStore& store, const std::string& prefix,
                          std::size_t input_dim, std::size_t hidden_dim);
  static GruParams Bind(ParamStore& store, const std::string& prefix);
  std::size_t input_dim() const { return input->value.cols(); }
  std::size_t hidden_dim() const { return recurrent_h->value.rows(); }
};

// Feed-forward attention: score_j = v . tanh(W_enc e_j + W_dec d + b).
struct AttentionParams {
  Parameter* w_enc = nullptr;  // [A x H]
  Parameter* w_dec = nullptr;  // [A x H]
  Parameter* bias = nullptr;   // [A]
  Parameter* v = nullptr;      // [A]

  static AttentionParams Create(ParamStore& store, const std::string& prefix,
                                std::size_t hidden_dim, std::size_t attn_dim);
  static AttentionParams Bind(ParamStore& store, const std::string& prefix);
};

struct AttentionResult {
  Vec context;
  Vec weights;
};

// ---- Plain evaluation (no tape) ----

Vec MatVec(const Tensor& w, std::span<const double> x);
Vec GruCell(std::span<const double> x, std::span<const double> h,
            const GruParams& p);
// Encoder-side projections W_enc e_j; reusable across decoder steps.
std::vector<Vec> AttentionKeys(const std::vector<Vec>& encoder_states,
                               const AttentionParams& p);
AttentionResult Attend(std::span<const double> decoder_state,
                       const std::vector<Vec>& encoder_states,
                       const std::vector<Vec>& keys, const AttentionParams& p);
AttentionResult Attend(std::span<const double> decoder_state,
                       const std::vector<Vec>& encoder_states,
                       const AttentionParams& p);
Vec SoftmaxVec(std::span<const double> logits);
Vec LogSoftmaxVec(std::span<const double> logits);
double CrossEntropyLoss(std::span<const double> logits, std::size_t target);
Tensor Dropout(const Tensor& t, double rate, bool training, RngStream& rng);

// ---- Taped evaluation ----

Var GruCell(Graph& g, Var x, Var h, const GruParams& p);
std::vector<Var> AttentionKeys(Graph& g, const std::vector<Var>& encoder_states,
                               const AttentionParams& p);
// Returns {context, weights}.
std::pair<Var, Var> Attend(Graph& g, Var decoder_state,
                           const std::vector<Var>& encoder_states,
                           const std::vector<Var>& keys, const AttentionParams& p);

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_LAYERS_H_
