#include "selfgen/seq2seq/model.h"

#include <nlohmann/json.hpp>

#include "selfgen/errors.h"
#include "selfgen/neural/checkpoint.h"

namespace selfgen {

void ModelConfig::Validate() const {
  if (embed_dim == 0 || hidden_dim == 0) throw ConfigError("model dims must be > 0");
  if (layers != 2) throw ConfigError("the generator uses exactly 2 layers");
  if (max_decode_length == 0) throw ConfigError("max decode length must be > 0");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (init_scale <= 0.0) throw ConfigError("init scale must be > 0");
}

Seq2SeqModel::Seq2SeqModel(ModelConfig config, Vocab input_vocab, Vocab output_vocab,
                           InputMode mode)
    : config_(config),
      input_vocab_(std::move(input_vocab)),
      output_vocab_(std::move(output_vocab)),
      mode_(mode) {
  config_.Validate();
  Build();
}

Seq2SeqModel::Seq2SeqModel(const Seq2SeqModel& other)
    : config_(other.config_),
      input_vocab_(other.input_vocab_),
      output_vocab_(other.output_vocab_),
      mode_(other.mode_),
      params_(other.params_) {
  Bind();
}

Seq2SeqModel& Seq2SeqModel::operator=(const Seq2SeqModel& other) {
  if (this == &other) return *this;
  config_ = other.config_;
  input_vocab_ = other.input_vocab_;
  output_vocab_ = other.output_vocab_;
  mode_ = other.mode_;
  params_ = other.params_;
  Bind();
  return *this;
}

void Seq2SeqModel::Build() {
  const std::size_t e = config_.embed_dim;
  const std::size_t h = config_.hidden_dim;
  params_.Add("encoder.embed", {input_vocab_.size(), e});
  params_.Add("decoder.embed", {output_vocab_.size(), e});
  for (std::size_t l = 0; l < config_.layers; ++l) {
    GruParams::Create(params_, "encoder.gru" + std::to_string(l), l == 0 ? e : h, h);
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    GruParams::Create(params_, "decoder.gru" + std::to_string(l), l == 0 ? e : h, h);
  }
  AttentionParams::Create(params_, "attention", h, h);
  params_.Add("output.weight", {output_vocab_.size(), 2 * h});
  params_.Add("output.bias", {output_vocab_.size()}, ParamRole::kBias);
  Bind();
}

void Seq2SeqModel::Bind() {
  enc_embed_ = &params_.Get("encoder.embed");
  dec_embed_ = &params_.Get("decoder.embed");
  enc_layers_.clear();
  dec_layers_.clear();
  for (std::size_t l = 0; l < config_.layers; ++l) {
    enc_layers_.push_back(GruParams::Bind(params_, "encoder.gru" + std::to_string(l)));
    dec_layers_.push_back(GruParams::Bind(params_, "decoder.gru" + std::to_string(l)));
  }
  attention_ = AttentionParams::Bind(params_, "attention");
  out_w_ = &params_.Get("output.weight");
  out_b_ = &params_.Get("output.bias");
}

void Seq2SeqModel::Initialize(std::uint64_t seed) {
  RngStream rng(seed, 0);
  params_.InitUniform(rng, config_.init_scale);
}

std::vector<std::size_t> Seq2SeqModel::EncodeInputTokens(const LinearizedInput& x) const {
  std::vector<std::size_t> ids;
  for (const std::string& t : x.tokens) {
    if (!input_vocab_.Contains(t)) {
      throw Error("input token '" + t + "' is outside the input vocabulary");
    }
    ids.push_back(input_vocab_.IndexOrThrow(t));
  }
  if (ids.empty()) throw ContractError("empty linearized input");
  return ids;
}

std::vector<std::size_t> Seq2SeqModel::EncodeTarget(
    const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(output_vocab_.Index(t));
  return ids;
}

EncoderOutput Seq2SeqModel::Encode(const LinearizedInput& x) const {
  const auto ids = EncodeInputTokens(x);
  return Encode(ids);
}

EncoderOutput Seq2SeqModel::Encode(std::span<const std::size_t> input_ids) const {
  if (input_ids.empty()) throw ContractError("empty linearized input");
  EncoderOutput out;
  std::vector<Vec> h(config_.layers, Vec(config_.hidden_dim, 0.0));
  for (std::size_t id : input_ids) {
    if (id >= input_vocab_.size()) throw Error("input id out of range");
    auto row = enc_embed_->value.row(id);
    Vec x(row.begin(), row.end());
    for (std::size_t l = 0; l < config_.layers; ++l) {
      h[l] = GruCell(x, h[l], enc_layers_[l]);
      x = h[l];
    }
    out.states.push_back(x);
  }
  out.keys = AttentionKeys(out.states, attention_);
  out.final_layers = h;
  return out;
}

DecoderState Seq2SeqModel::InitialState(const EncoderOutput& enc) const {
  return DecoderState{enc.final_layers};
}

StepOutput Seq2SeqModel::DecoderStep(std::size_t prev_token, const DecoderState& state,
                                     const EncoderOutput& enc, const Vec* noise) const {
  if (prev_token >= output_vocab_.size()) throw Error("decoder token out of range");
  StepOutput out;
  auto row = dec_embed_->value.row(prev_token);
  Vec x(row.begin(), row.end());
  out.next.layers.resize(config_.layers);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    out.next.layers[l] = GruCell(x, state.layers[l], dec_layers_[l]);
    x = out.next.layers[l];
  }
  Vec& top = out.next.layers.back();
  if (noise != nullptr) {
    if (noise->size() != top.size()) throw DimensionError("noise dimension mismatch");
    for (std::size_t i = 0; i < top.size(); ++i) top[i] += (*noise)[i];
  }
  AttentionResult att = Attend(top, enc.states, enc.keys, attention_);
  Vec joint = top;
  joint.insert(joint.end(), att.context.begin(), att.context.end());
  out.logits = MatVec(out_w_->value, joint);
  for (std::size_t i = 0; i < out.logits.size(); ++i) out.logits[i] += out_b_->value[i];
  out.attention = std::move(att.weights);
  return out;
}

double Seq2SeqModel::SequenceNll(std::span<const std::size_t> input_ids,
                                 std::span<const std::size_t> target_ids) const {
  if (target_ids.empty()) throw ContractError("empty target utterance");
  const EncoderOutput enc = Encode(input_ids);
  DecoderState state = InitialState(enc);
  std::size_t prev = output_vocab_.bos();
  const std::size_t eos = output_vocab_.eos();
  double total = 0.0;
  for (std::size_t t = 0; t <= target_ids.size(); ++t) {
    const std::size_t target = t < target_ids.size() ? target_ids[t] : eos;
    StepOutput step = DecoderStep(prev, state, enc);
    total += CrossEntropyLoss(step.logits, target);
    state = std::move(step.next);
    prev = target;
  }
  return total;
}

Var Seq2SeqModel::SequenceLoss(Graph& g, std::span<const std::size_t> input_ids,
                               std::span<const std::size_t> target_ids, bool training,
                               RngStream& rng) {
  if (target_ids.empty()) throw ContractError("empty target utterance");
  if (input_ids.empty()) throw ContractError("empty linearized input");
  const double p = config_.dropout;
  std::vector<Var> h(config_.layers, g.Constant(Tensor(config_.hidden_dim)));
  std::vector<Var> enc_states;
  for (std::size_t id : input_ids) {
    if (id >= input_vocab_.size()) throw Error("input id out of range");
    Var x = g.Dropout(g.Row(*enc_embed_, id), p, training, rng);
    for (std::size_t l = 0; l < config_.layers; ++l) {
      h[l] = GruCell(g, x, h[l], enc_layers_[l]);
      x = g.Dropout(h[l], p, training, rng);
    }
    enc_states.push_back(x);
  }
  const std::vector<Var> keys = AttentionKeys(g, enc_states, attention_);

  std::vector<Var> s = h;
  Var out_w = g.Param(*out_w_);
  Var out_b = g.Param(*out_b_);
  std::vector<Var> losses;
  std::size_t prev = output_vocab_.bos();
  const std::size_t eos = output_vocab_.eos();
  for (std::size_t t = 0; t <= target_ids.size(); ++t) {
    const std::size_t target = t < target_ids.size() ? target_ids[t] : eos;
    Var x = g.Dropout(g.Row(*dec_embed_, prev), p, training, rng);
    for (std::size_t l = 0; l < config_.layers; ++l) {
      s[l] = GruCell(g, x, s[l], dec_layers_[l]);
      x = l + 1 < config_.layers ? g.Dropout(s[l], p, training, rng) : s[l];
    }
    Var top = s.back();
    auto [context, weights] = Attend(g, top, enc_states, keys, attention_);
    (void)weights;
    Var joint = g.Concat({g.Dropout(top, p, training, rng), context});
    Var logits = g.Add(g.MatVec(out_w, joint), out_b);
    losses.push_back(g.CrossEntropy(logits, target));
    prev = target;
  }
  return g.Sum(losses);
}

std::string Seq2SeqModel::MetadataJson() const {
  nlohmann::json j;
  j["format"] = "selfgen-seq2seq";
  j["config"] = {{"embed_dim", config_.embed_dim},
                 {"hidden_dim", config_.hidden_dim},
                 {"layers", config_.layers},
                 {"dropout", config_.dropout},
                 {"max_decode_length", config_.max_decode_length},
                 {"init_scale", config_.init_scale}};
  j["mode"] = InputModeName(mode_);
  j["input_vocab"] = input_vocab_.tokens();
  j["output_vocab"] = output_vocab_.tokens();
  return j.dump();
}

void Seq2SeqModel::Save(const std::string& path) const {
  SaveArchive(path, ArchiveFromParams(params_, MetadataJson()));
}

Seq2SeqModel Seq2SeqModel::Load(const std::string& path) {
  TensorArchive archive = LoadArchive(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(archive.metadata);
    if (j.at("format") != "selfgen-seq2seq") {
      throw CheckpointError("checkpoint is not a generator checkpoint");
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint metadata: ") + e.what());
  }
  ModelConfig cfg;
  const auto& c = j.at("config");
  cfg.embed_dim = c.at("embed_dim");
  cfg.hidden_dim = c.at("hidden_dim");
  cfg.layers = c.at("layers");
  cfg.dropout = c.at("dropout");
  cfg.max_decode_length = c.at("max_decode_length");
  cfg.init_scale = c.at("init_scale");
  Seq2SeqModel model(cfg, Vocab(j.at("input_vocab").get<std::vector<std::string>>()),
                     Vocab(j.at("output_vocab").get<std::vector<std::string>>()),
                     ParseInputMode(j.at("mode").get<std::string>()));
  RestoreParams(archive, model.params_);
  return model;
}

}  // namespace selfgen
