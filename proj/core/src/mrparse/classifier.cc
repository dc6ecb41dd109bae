#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/parser.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"
#include "selfgen/neural/checkpoint.h"
#include "selfgen/neural/layers.h"

namespace selfgen {
namespace {

constexpr std::string_view kActTarget = "@act";

std::size_t ArgMax(const Vec& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Encoded {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> labels;  // one per target
};

std::vector<std::vector<std::string>> PreparedUtterances(const Dataset& ds, InputMode mode,
                                                         std::vector<const Example*>* owners) {
  const std::set<std::string> delex = DelexAttributes(ds.schema, mode);
  std::vector<std::vector<std::string>> out;
  for (const Example& ex : ds.examples) {
    for (const Utterance& u : ex.refs) {
      try {
        out.push_back(Delexicalize(u, ex.mr, ds.schema, delex).first.tokens);
        owners->push_back(&ex);
      } catch (const DelexMissError&) {
      }
    }
  }
  return out;
}

std::size_t LabelOf(const ClassifierTarget& t, const MeaningRepresentation& mr) {
  const std::string value =
      t.name == kActTarget ? mr.act : (mr.Has(t.name) ? mr.ValueOf(t.name) : std::string(kNotApplicable));
  auto it = std::find(t.classes.begin(), t.classes.end(), value);
  if (it == t.classes.end()) throw SchemaError("label '" + value + "' outside " + t.name);
  return static_cast<std::size_t>(it - t.classes.begin());
}

}  // namespace

void ClassifierConfig::Validate() const {
  if (embed_dim == 0 || filters == 0 || hidden_dim == 0) {
    throw ConfigError("classifier dims must be > 0");
  }
  if (widths.empty() || std::count(widths.begin(), widths.end(), 0u) > 0) {
    throw ConfigError("classifier filter widths must be >= 1");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (batch_size == 0) throw ConfigError("batch_size must be > 0");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (init_scale <= 0.0) throw ConfigError("init scale must be > 0");
}

// ---------------------------------------------------------------- TextCnn

TextCnn::TextCnn(const ClassifierConfig& cfg, std::size_t vocab_size, std::size_t classes,
                 const std::string& prefix)
    : cfg_(cfg), classes_(classes), prefix_(prefix) {
  params_.Add(prefix + ".embed", {vocab_size, cfg.embed_dim});
  for (std::size_t w : cfg.widths) {
    const std::string p = prefix + ".conv" + std::to_string(w);
    params_.Add(p + ".weight", {cfg.filters, w * cfg.embed_dim});
    params_.Add(p + ".bias", {cfg.filters}, ParamRole::kBias);
  }
  params_.Add(prefix + ".hidden.weight", {cfg.hidden_dim, cfg.filters * cfg.widths.size()});
  params_.Add(prefix + ".hidden.bias", {cfg.hidden_dim}, ParamRole::kBias);
  params_.Add(prefix + ".out.weight", {classes, cfg.hidden_dim});
  params_.Add(prefix + ".out.bias", {classes}, ParamRole::kBias);
  Bind();
}

TextCnn::TextCnn(const TextCnn& other)
    : cfg_(other.cfg_), classes_(other.classes_), prefix_(other.prefix_), params_(other.params_) {
  if (params_.size() > 0) Bind();
}

TextCnn& TextCnn::operator=(const TextCnn& other) {
  if (this == &other) return *this;
  cfg_ = other.cfg_;
  classes_ = other.classes_;
  prefix_ = other.prefix_;
  params_ = other.params_;
  conv_w_.clear();
  conv_b_.clear();
  if (params_.size() > 0) Bind();
  return *this;
}

void TextCnn::Bind() {
  embed_ = &params_.Get(prefix_ + ".embed");
  conv_w_.clear();
  conv_b_.clear();
  for (std::size_t w : cfg_.widths) {
    const std::string p = prefix_ + ".conv" + std::to_string(w);
    conv_w_.push_back(&params_.Get(p + ".weight"));
    conv_b_.push_back(&params_.Get(p + ".bias"));
  }
  hidden_w_ = &params_.Get(prefix_ + ".hidden.weight");
  hidden_b_ = &params_.Get(prefix_ + ".hidden.bias");
  out_w_ = &params_.Get(prefix_ + ".out.weight");
  out_b_ = &params_.Get(prefix_ + ".out.bias");
}

Var TextCnn::Logits(Graph& g, std::span<const std::size_t> ids, bool training,
                    RngStream& rng) {
  const double p = cfg_.dropout;
  std::vector<Var> embeds;
  for (std::size_t id : ids) embeds.push_back(g.Dropout(g.Row(*embed_, id), p, training, rng));
  std::vector<Var> pooled;
  for (std::size_t k = 0; k < cfg_.widths.size(); ++k) {
    const std::size_t w = cfg_.widths[k];
    Var weight = g.Param(*conv_w_[k]);
    Var bias = g.Param(*conv_b_[k]);
    std::vector<Var> features;
    for (std::size_t i = 0; i + w <= embeds.size(); ++i) {
      Var window = w == 1 ? embeds[i]
                          : g.Concat(std::vector<Var>(embeds.begin() + i, embeds.begin() + i + w));
      features.push_back(g.Relu(g.Add(g.MatVec(weight, window), bias)));
    }
    pooled.push_back(g.MaxPool(features));
  }
  Var joint = g.Dropout(g.Concat(pooled), p, training, rng);
  Var hidden = g.Relu(g.Add(g.MatVec(g.Param(*hidden_w_), joint), g.Param(*hidden_b_)));
  hidden = g.Dropout(hidden, p, training, rng);
  return g.Add(g.MatVec(g.Param(*out_w_), hidden), g.Param(*out_b_));
}

Vec TextCnn::Probabilities(std::span<const std::size_t> ids) const {
  Vec joint;
  for (std::size_t k = 0; k < cfg_.widths.size(); ++k) {
    const std::size_t w = cfg_.widths[k];
    Vec best(cfg_.filters, 0.0);  // ReLU outputs are >= 0
    Vec window(w * cfg_.embed_dim);
    for (std::size_t i = 0; i + w <= ids.size(); ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        auto row = embed_->value.row(ids[i + j]);
        std::copy(row.begin(), row.end(), window.begin() + j * cfg_.embed_dim);
      }
      const Vec f = MatVec(conv_w_[k]->value, window);
      for (std::size_t c = 0; c < f.size(); ++c) {
        best[c] = std::max(best[c], f[c] + conv_b_[k]->value[c]);
      }
    }
    joint.insert(joint.end(), best.begin(), best.end());
  }
  Vec hidden = MatVec(hidden_w_->value, joint);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    hidden[i] = std::max(0.0, hidden[i] + hidden_b_->value[i]);
  }
  Vec logits = MatVec(out_w_->value, hidden);
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += out_b_->value[i];
  return SoftmaxVec(logits);
}

// ------------------------------------------------------------ F1 helpers

double MacroF1(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& predicted) {
  if (gold.size() != predicted.size()) throw ContractError("label lists differ in length");
  std::map<std::size_t, std::array<std::size_t, 3>> counts;  // tp, fp, fn
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) {
      ++counts[gold[i]][0];
    } else {
      ++counts[predicted[i]][1];
      ++counts[gold[i]][2];
    }
  }
  if (counts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [cls, c] : counts) {
    const double denom = 2.0 * c[0] + c[1] + c[2];
    sum += denom == 0.0 ? 0.0 : 2.0 * c[0] / denom;
  }
  return sum / counts.size();
}

// ------------------------------------------------------ ClassifierParser

void ClassifierParser::BuildDetectors() {
  std::string text;
  for (const AttributeDef& def : schema_.attributes()) {
    if (!def.delexicalized) continue;
    text += "[attribute " + def.name + "]\n@literal\n@placeholder\n";
  }
  detectors_ = RulePack::FromText(text, schema_);
}

const ClassifierTarget* ClassifierParser::Find(std::string_view name) const {
  for (const ClassifierTarget& t : targets_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::size_t> ClassifierParser::EncodeTokens(
    const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> ids;
  for (const std::string& t : tokens) ids.push_back(vocab_.Index(t));
  std::size_t min_len = 1;
  for (std::size_t w : cfg_.widths) min_len = std::max(min_len, w);
  while (ids.size() < min_len) ids.push_back(vocab_.pad());
  return ids;
}

ClassifierParser ClassifierParser::Train(const Dataset& train, const Dataset& valid,
                                         InputMode mode, const ClassifierConfig& cfg,
                                         std::vector<ClassifierEpoch>* log,
                                         std::ostream* progress) {
  cfg.Validate();
  ClassifierParser parser;
  parser.schema_ = train.schema;
  parser.cfg_ = cfg;
  parser.mode_ = mode;
  parser.BuildDetectors();

  std::vector<const Example*> train_owner, valid_owner;
  const auto train_utts = PreparedUtterances(train, mode, &train_owner);
  const auto valid_utts = PreparedUtterances(valid, mode, &valid_owner);
  if (train_utts.empty()) throw ContractError("classifier training set is empty");

  std::map<std::string, std::size_t> counts;
  for (const auto& u : train_utts) {
    for (const std::string& t : u) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [t, c] : counts) {
    if (c >= cfg.min_token_count) kept.emplace_back(t, c);
  }
  parser.vocab_ = VocabFromCounts(kept, {std::string(kPadToken), std::string(kUnkToken)});

  if (parser.schema_.style() == LinearizationStyle::kDaVariable) {
    ClassifierTarget t;
    t.name = std::string(kActTarget);
    for (const DialogueActDef& a : parser.schema_.acts()) t.classes.push_back(a.name);
    parser.targets_.push_back(std::move(t));
  }
  for (const AttributeDef& def : parser.schema_.attributes()) {
    if (def.delexicalized) continue;
    ClassifierTarget t;
    t.name = def.name;
    t.classes = def.values;
    t.classes.emplace_back(kNotApplicable);
    parser.targets_.push_back(std::move(t));
  }

  auto encode = [&](const std::vector<std::vector<std::string>>& utts,
                    const std::vector<const Example*>& owners) {
    std::vector<Encoded> out;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      Encoded e;
      e.ids = parser.EncodeTokens(utts[i]);
      for (const ClassifierTarget& t : parser.targets_) e.labels.push_back(LabelOf(t, owners[i]->mr));
      out.push_back(std::move(e));
    }
    return out;
  };
  const std::vector<Encoded> train_set = encode(train_utts, train_owner);
  const std::vector<Encoded> valid_set = encode(valid_utts, valid_owner);
  const std::vector<Encoded>& select_set = valid_set.empty() ? train_set : valid_set;

  for (std::size_t ti = 0; ti < parser.targets_.size(); ++ti) {
    ClassifierTarget& target = parser.targets_[ti];
    std::set<std::size_t> observed;
    for (const Encoded& e : train_set) observed.insert(e.labels[ti]);
    if (observed.size() == 1) {
      target.constant = *observed.begin();
      std::cerr << "warning: '" << target.name << "' has a single training label ("
                << target.classes[*target.constant] << "); using a constant classifier\n";
      continue;
    }
    TextCnn model(cfg, parser.vocab_.size(), target.classes.size(), target.name);
    RngStream init(cfg.seed, 100 + ti);
    model.params().InitUniform(init, cfg.init_scale);
    RngStream shuffle(cfg.seed, 200 + ti);
    RngStream dropout(cfg.seed, 300 + ti);

    auto f1_of = [&](const TextCnn& m) {
      std::vector<std::size_t> gold, pred;
      for (const Encoded& e : select_set) {
        gold.push_back(e.labels[ti]);
        pred.push_back(ArgMax(m.Probabilities(e.ids)));
      }
      return MacroF1(gold, pred);
    };

    TextCnn best = model;
    target.best_f1 = -1.0;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.Below(i)]);
      double loss_sum = 0.0;
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(order.size(), start + cfg.batch_size);
        model.params().ZeroGrads();
        for (std::size_t b = start; b < end; ++b) {
          const Encoded& e = train_set[order[b]];
          Graph g;
          Var loss = g.CrossEntropy(model.Logits(g, e.ids, true, dropout), e.labels[ti]);
          loss_sum += g.scalar(loss);
          g.Backward(g.Scale(loss, 1.0 / static_cast<double>(end - start)));
        }
        SgdStep(model.params(), cfg.lr, cfg.weight_decay);
      }
      const double f1 = f1_of(model);
      if (log != nullptr) {
        log->push_back({target.name, epoch, loss_sum / train_set.size(), f1});
      }
      if (progress != nullptr) {
        *progress << target.name << " epoch " << epoch << " loss "
                  << loss_sum / train_set.size() << " valid_f1 " << f1 << "\n";
      }
      if (f1 > target.best_f1) {
        target.best_f1 = f1;
        target.best_epoch = epoch;
        best = model;
      }
    }
    if (cfg.epochs == 0) {
      target.best_f1 = f1_of(model);
      target.best_epoch = 0;
    }
    best.params().ZeroGrads();
    target.model = std::move(best);
  }
  return parser;
}

ParseOutcome ClassifierParser::Parse(const Utterance& utt, const DelexMapping* bindings,
                                     double threshold) const {
  ParseOutcome out;
  const ParseOutcome det = RuleParse(utt, detectors_, bindings);
  std::map<std::string, AttributeEvidence> evidence;
  for (const AttributeEvidence& ev : det.evidence) {
    const std::size_t index = schema_.AttributeIndexOrThrow(ev.attribute);
    for (const std::string& v : ev.values) {
      if (!schema_.CanonicalValue(index, v) && out.reason.empty()) {
        out.reason = "unbound placeholder " + v;
      }
    }
    evidence[ev.attribute] = ev;
  }

  const std::vector<std::size_t> ids = EncodeTokens(utt.tokens);
  if (schema_.style() == LinearizationStyle::kFixedPosition) out.act = schema_.DefaultAct().name;
  for (const ClassifierTarget& t : targets_) {
    Vec probs;
    if (t.constant) {
      probs.assign(t.classes.size(), 0.0);
      probs[*t.constant] = 1.0;
    } else {
      probs = t.model.Probabilities(ids);
    }
    const std::size_t best = ArgMax(probs);
    if (probs[best] < threshold && out.reason.empty()) {
      out.reason = "low confidence on " + t.name;
    }
    if (t.name == kActTarget) {
      out.act = t.classes[best];
      continue;
    }
    if (t.classes[best] == kNotApplicable) continue;
    AttributeEvidence ev;
    ev.attribute = t.name;
    ev.values = {t.classes[best]};
    ev.confidence = probs[best];
    evidence[t.name] = ev;
  }
  for (const AttributeDef& def : schema_.attributes()) {
    auto it = evidence.find(def.name);
    if (it != evidence.end()) out.evidence.push_back(it->second);
  }
  if (!out.reason.empty()) return out;

  const DialogueActDef& act = schema_.Act(out.act);
  MeaningRepresentation mr;
  mr.act = out.act;
  for (const AttributeEvidence& ev : out.evidence) {
    if (static_cast<int>(ev.values.size()) > act.max_repeat) {
      out.reason = "conflicting values for " + ev.attribute;
      return out;
    }
    for (const std::string& v : ev.values) mr.slots.push_back({ev.attribute, v});
  }
  Canonicalize(&mr, schema_);
  try {
    ValidateMr(mr, schema_);
  } catch (const SchemaError& e) {
    out.reason = e.what();
    return out;
  }
  out.valid = true;
  out.mr = std::move(mr);
  return out;
}

ParseOutcome ClfParse(const Utterance& utt, const ClassifierParser& parser, double threshold,
                      const DelexMapping* bindings) {
  return parser.Parse(utt, bindings, threshold);
}

void ClassifierParser::Save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "selfgen-classifier";
  j["schema"] = nlohmann::json::parse(schema_.ToJsonText());
  j["mode"] = InputModeName(mode_);
  j["config"] = {{"embed_dim", cfg_.embed_dim},   {"filters", cfg_.filters},
                 {"widths", cfg_.widths},         {"hidden_dim", cfg_.hidden_dim},
                 {"dropout", cfg_.dropout},       {"epochs", cfg_.epochs},
                 {"lr", cfg_.lr},                 {"weight_decay", cfg_.weight_decay},
                 {"batch_size", cfg_.batch_size}, {"init_scale", cfg_.init_scale},
                 {"min_token_count", cfg_.min_token_count}, {"seed", cfg_.seed}};
  j["vocab"] = vocab_.tokens();
  TensorArchive archive;
  for (const ClassifierTarget& t : targets_) {
    nlohmann::json tj = {{"name", t.name},
                         {"classes", t.classes},
                         {"best_epoch", t.best_epoch},
                         {"best_f1", t.best_f1}};
    tj["constant"] = t.constant ? nlohmann::json(*t.constant) : nlohmann::json(nullptr);
    j["targets"].push_back(tj);
    if (t.constant) continue;
    TensorArchive part = ArchiveFromParams(t.model.params(), "");
    for (NamedTensor& nt : part.tensors) archive.tensors.push_back(std::move(nt));
  }
  archive.metadata = j.dump();
  SaveArchive(path, archive);
}

ClassifierParser ClassifierParser::Load(const std::string& path) {
  const TensorArchive archive = LoadArchive(path);
  ClassifierParser parser;
  try {
    const auto j = nlohmann::json::parse(archive.metadata);
    if (j.at("format") != "selfgen-classifier") {
      throw CheckpointError("checkpoint is not a classifier checkpoint");
    }
    parser.schema_ = DomainSchema::FromJsonText(j.at("schema").dump());
    parser.mode_ = ParseInputMode(j.at("mode").get<std::string>());
    const auto& c = j.at("config");
    ClassifierConfig& cfg = parser.cfg_;
    cfg.embed_dim = c.at("embed_dim");
    cfg.filters = c.at("filters");
    cfg.widths = c.at("widths").get<std::vector<std::size_t>>();
    cfg.hidden_dim = c.at("hidden_dim");
    cfg.dropout = c.at("dropout");
    cfg.epochs = c.at("epochs");
    cfg.lr = c.at("lr");
    cfg.weight_decay = c.at("weight_decay");
    cfg.batch_size = c.at("batch_size");
    cfg.init_scale = c.at("init_scale");
    cfg.min_token_count = c.at("min_token_count");
    cfg.seed = c.at("seed");
    parser.vocab_ = Vocab(j.at("vocab").get<std::vector<std::string>>());
    for (const auto& tj : j.at("targets")) {
      ClassifierTarget t;
      t.name = tj.at("name");
      t.classes = tj.at("classes").get<std::vector<std::string>>();
      t.best_epoch = tj.at("best_epoch");
      t.best_f1 = tj.at("best_f1");
      if (!tj.at("constant").is_null()) t.constant = tj.at("constant").get<std::size_t>();
      if (!t.constant) {
        t.model = TextCnn(cfg, parser.vocab_.size(), t.classes.size(), t.name);
        TensorArchive part;
        const std::string prefix = t.name + ".";
        for (const NamedTensor& nt : archive.tensors) {
          if (nt.name.compare(0, prefix.size(), prefix) == 0) part.tensors.push_back(nt);
        }
        RestoreParams(part, t.model.params());
      }
      parser.targets_.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad classifier metadata: ") + e.what());
  }
  parser.BuildDetectors();
  return parser;
}

std::string_view ParserChoiceName(ParserChoice choice) {
  return choice == ParserChoice::kRules ? "rules" : "classifier";
}

ParserChoice ParseParserChoice(std::string_view name) {
  if (name == "rules") return ParserChoice::kRules;
  if (name == "classifier") return ParserChoice::kClassifier;
  throw ConfigError("unknown parser '" + std::string(name) + "' (rules | classifier)");
}

}  // namespace selfgen
