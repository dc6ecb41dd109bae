#ifndef SELFGEN_SEQ2SEQ_TRAIN_H_
#define SELFGEN_SEQ2SEQ_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/vocab.h"
#include "selfgen/seq2seq/model.h"

namespace selfgen {

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 128;
  double lr = 0.25;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;
  double max_grad_norm = 0.0;  // 0 disables clipping
  std::size_t workers = 1;     // validation decoding only

  void Validate() const;  // throws ConfigError
};

// One (input, delexicalized target) pair per usable reference.
struct TrainingPair {
  LinearizedInput input;
  std::vector<std::string> target;
};

// References whose delexicalization misses are dropped; `dropped` receives
// their count and a warning goes to stderr when it is nonzero.
std::vector<TrainingPair> MakeTrainingPairs(const Dataset& ds, InputMode mode,
                                            std::size_t* dropped = nullptr);

// A validation MR with all of its lexical references.
struct ValidationItem {
  MeaningRepresentation mr;
  LinearizedInput input;
  DelexMapping mapping;
  std::vector<std::vector<std::string>> refs;
};

std::vector<ValidationItem> MakeValidationItems(const Dataset& ds, InputMode mode);

// Corpus BLEU of relexicalized greedy decodes against the grouped references.
double ValidationBleu(const Seq2SeqModel& model, const std::vector<ValidationItem>& items,
                      std::size_t workers = 1);

struct EpochRecord {
  std::size_t epoch = 0;    // 0 = the initial model
  double train_loss = 0.0;  // mean NLL per target token (EOS included)
  double valid_bleu = 0.0;
};

struct TrainResult {
  Seq2SeqModel model;  // parameters of the best epoch
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_bleu = 0.0;
  std::size_t dropped_pairs = 0;
};

// Minibatch SGD on the token-mean NLL of each batch. Every epoch, including
// the untrained epoch 0, is scored by validation BLEU; the model with the
// highest score (earliest on ties) is returned. Records are also written as
// JSON lines to `log` when given. Vocabularies come from `vocab` or are built
// from `train`. Throws NumericalError on a non-finite loss.
TrainResult Train(const Dataset& train, const Dataset& valid, InputMode mode,
                  const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const std::optional<VocabPair>& vocab = std::nullopt,
                  std::ostream* log = nullptr);

std::string EpochRecordJson(const EpochRecord& r);

}  // namespace selfgen

#endif  // SELFGEN_SEQ2SEQ_TRAIN_H_
