#ifndef SELFGEN_MRPARSE_CLASSIFIER_H_
#define SELFGEN_MRPARSE_CLASSIFIER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/vocab.h"
#include "selfgen/mrparse/rule_pack.h"
#include "selfgen/neural/graph.h"
#include "selfgen/neural/layers.h"
#include "selfgen/neural/param_store.h"

namespace selfgen {

inline constexpr std::string_view kNotApplicable = "n/a";

struct ClassifierConfig {
  std::size_t embed_dim = 50;
  std::size_t filters = 50;  // per filter width
  std::vector<std::size_t> widths{1, 2, 3};
  std::size_t hidden_dim = 50;
  double dropout = 0.25;
  std::size_t epochs = 30;
  double lr = 0.25;
  double weight_decay = 1e-4;
  std::size_t batch_size = 8;
  double init_scale = 0.1;
  std::size_t min_token_count = 2;  // rarer training tokens train the UNK row
  std::uint64_t seed = 1;

  void Validate() const;  // throws ConfigError
};

// Convolutional sentence classifier: embeddings, one bank of ReLU filters
// per width, max-pool over positions, ReLU hidden layer, softmax output.
class TextCnn {
 public:
  TextCnn() = default;
  TextCnn(const ClassifierConfig& cfg, std::size_t vocab_size, std::size_t classes,
          const std::string& prefix);
  TextCnn(const TextCnn& other);
  TextCnn& operator=(const TextCnn& other);

  std::size_t num_classes() const { return classes_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  Var Logits(Graph& g, std::span<const std::size_t> ids, bool training, RngStream& rng);
  Vec Probabilities(std::span<const std::size_t> ids) const;

 private:
  void Bind();

  ClassifierConfig cfg_;
  std::size_t classes_ = 0;
  std::string prefix_;
  ParamStore params_;
  Parameter* embed_ = nullptr;
  std::vector<Parameter*> conv_w_;
  std::vector<Parameter*> conv_b_;
  Parameter* hidden_w_ = nullptr;
  Parameter* hidden_b_ = nullptr;
  Parameter* out_w_ = nullptr;
  Parameter* out_b_ = nullptr;
};

// One decision the parser makes: an attribute's value (classes are the
// vocabulary plus n/a) or, for dialogue-act domains, the act.
struct ClassifierTarget {
  std::string name;  // attribute name, or "@act"
  std::vector<std::string> classes;
  TextCnn model;
  std::optional<std::size_t> constant;  // degenerate training labels
  std::size_t best_epoch = 0;
  double best_f1 = 0.0;
};

struct ClassifierEpoch {
  std::string target;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_f1 = 0.0;
};

// Per-attribute classifiers for the attributes the schema does not
// delexicalize; delexicalized attributes are read off placeholder tokens
// (or verbatim values), as in the rule parser.
class ClassifierParser {
 public:
  ClassifierParser() = default;

  // Utterances are delexicalized per `mode` before training. Each target
  // keeps the epoch with the best validation macro-F1 (earliest on ties).
  static ClassifierParser Train(const Dataset& train, const Dataset& valid, InputMode mode,
                                const ClassifierConfig& cfg,
                                std::vector<ClassifierEpoch>* log = nullptr,
                                std::ostream* progress = nullptr);

  const DomainSchema& schema() const { return schema_; }
  const Vocab& vocab() const { return vocab_; }
  const std::vector<ClassifierTarget>& targets() const { return targets_; }
  std::vector<ClassifierTarget>& targets() { return targets_; }
  const ClassifierTarget* Find(std::string_view name) const;

  std::vector<std::size_t> EncodeTokens(const std::vector<std::string>& tokens) const;

  // Every argmax probability, n/a included, must reach `threshold`.
  ParseOutcome Parse(const Utterance& utt, const DelexMapping* bindings = nullptr,
                     double threshold = 0.5) const;

  void Save(const std::string& path) const;
  static ClassifierParser Load(const std::string& path);

 private:
  DomainSchema schema_;
  ClassifierConfig cfg_;
  InputMode mode_ = InputMode::kE2eDelex;
  Vocab vocab_;
  RulePack detectors_;  // placeholder/literal matching for delexicalized attributes
  std::vector<ClassifierTarget> targets_;

  void BuildDetectors();
};

ParseOutcome ClfParse(const Utterance& utt, const ClassifierParser& parser,
                      double threshold = 0.5, const DelexMapping* bindings = nullptr);

// Mean per-class F1 over classes occurring in `gold` or `predicted`.
double MacroF1(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& predicted);

}  // namespace selfgen

#endif  // SELFGEN_MRPARSE_CLASSIFIER_H_
