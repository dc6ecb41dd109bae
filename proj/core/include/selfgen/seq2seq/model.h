#ifndef SELFGEN_SEQ2SEQ_MODEL_H_
#define SELFGEN_SEQ2SEQ_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/vocab.h"
#include "selfgen/neural/graph.h"
#include "selfgen/neural/layers.h"
#include "selfgen/neural/param_store.h"

namespace selfgen {

struct ModelConfig {
  std::size_t embed_dim = 512;
  std::size_t hidden_dim = 512;
  std::size_t layers = 2;
  double dropout = 0.25;
  std::size_t max_decode_length = 60;
  double init_scale = 0.1;

  void Validate() const;  // throws ConfigError
};

// Top-layer encoder outputs plus the attention keys computed from them.
struct EncoderOutput {
  std::vector<Vec> states;        // one per input token
  std::vector<Vec> keys;          // W_enc * state
  std::vector<Vec> final_layers;  // last hidden state of each layer
};

struct DecoderState {
  std::vector<Vec> layers;  // bottom to top
};

struct StepOutput {
  Vec logits;
  DecoderState next;
  Vec attention;
};

// Two-layer unidirectional GRU encoder-decoder with feed-forward attention.
// The decoder starts from a per-layer copy of the final encoder states; the
// top decoder state queries attention and [state; context] feeds the output
// projection.
class Seq2SeqModel {
 public:
  Seq2SeqModel(ModelConfig config, Vocab input_vocab, Vocab output_vocab,
               InputMode mode);
  Seq2SeqModel(const Seq2SeqModel& other);
  Seq2SeqModel& operator=(const Seq2SeqModel& other);

  // Weights uniform on [-init_scale, init_scale], biases zero.
  void Initialize(std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocab& input_vocab() const { return input_vocab_; }
  const Vocab& output_vocab() const { return output_vocab_; }
  InputMode mode() const { return mode_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Throws Error for tokens outside the input vocabulary.
  std::vector<std::size_t> EncodeInputTokens(const LinearizedInput& x) const;
  std::vector<std::size_t> EncodeTarget(const std::vector<std::string>& tokens) const;

  // ---- Inference (eval mode, no tape) ----
  EncoderOutput Encode(const LinearizedInput& x) const;
  EncoderOutput Encode(std::span<const std::size_t> input_ids) const;
  DecoderState InitialState(const EncoderOutput& enc) const;
  // One decoder step. When `noise` is given it is added to the top-layer
  // state before attention and projection, and the perturbed state is what
  // carries forward.
  StepOutput DecoderStep(std::size_t prev_token, const DecoderState& state,
                         const EncoderOutput& enc,
                         const Vec* noise = nullptr) const;
  // Teacher-forced sum of per-token cross entropies, EOS included.
  double SequenceNll(std::span<const std::size_t> input_ids,
                     std::span<const std::size_t> target_ids) const;

  // ---- Taped (training) ----
  Var SequenceLoss(Graph& g, std::span<const std::size_t> input_ids,
                   std::span<const std::size_t> target_ids, bool training,
                   RngStream& dropout_rng);

  // Self-contained checkpoint: config, mode and vocabularies go in the
  // container metadata.
  void Save(const std::string& path) const;
  static Seq2SeqModel Load(const std::string& path);
  std::string MetadataJson() const;

 private:
  void Build();
  void Bind();

  ModelConfig config_;
  Vocab input_vocab_;
  Vocab output_vocab_;
  InputMode mode_;
  ParamStore params_;

  Parameter* enc_embed_ = nullptr;
  Parameter* dec_embed_ = nullptr;
  std::vector<GruParams> enc_layers_;
  std::vector<GruParams> dec_layers_;
  AttentionParams attention_;
  Parameter* out_w_ = nullptr;
  Parameter* out_b_ = nullptr;
};

}  // namespace selfgen

#endif  // SELFGEN_SEQ2SEQ_MODEL_H_
