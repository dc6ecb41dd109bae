#ifndef SELFGEN_SELFTRAIN_AUGMENT_H_
#define SELFGEN_SELFTRAIN_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/delex.h"
#include "selfgen/mrparse/parser.h"
#include "selfgen/seq2seq/model.h"
#include "selfgen/seq2seq/train.h"

namespace selfgen {

struct SelfTrainConfig {
  std::size_t iterations_per_size = 25000;
  std::size_t samples_per_mr = 200;  // n
  std::size_t keep_k = 20;
  double sigma0 = 1.0;
  bool rescore_clean = false;
  // MR sizes (slot counts, required slots included). Fixed-position domains
  // only; dialogue-act domains use every (act, size) seen in training.
  std::size_t min_size = 3;
  std::size_t max_size = 8;
  ParserChoice parser = ParserChoice::kRules;
  double classifier_threshold = 0.5;
  std::uint64_t seed = 1;
  bool dedup_against_training = true;
  bool dedup_within_run = true;
  std::size_t workers = 1;

  void Validate(const DomainSchema& schema) const;  // throws ConfigError
};

struct Provenance {
  std::uint64_t seed = 0;  // batch seed: sample i used RngStream(seed, i)
  double sigma0 = 0.0;
  MeaningRepresentation source;
  double avg_ll = 0.0;
  std::uint64_t sample_index = 0;
  std::string group;  // "size=5" or "compare/size=4"
  std::size_t iteration = 0;
};

struct AugmentedExample {
  MeaningRepresentation mr;  // parser output
  Utterance utt;             // relexicalized surface
  Utterance generated;       // decoder output as sampled (placeholders kept)
  DelexMapping bindings;     // placeholder values of the source MR
  Provenance provenance;
};

struct AugmentationGroupReport {
  std::string group;
  std::size_t iterations = 0;
  std::size_t drawn = 0;
  std::size_t retained = 0;  // after top-k
  std::size_t deduped = 0;
  std::size_t rejected = 0;  // invalid parse
  std::size_t kept = 0;
};

struct AugmentationReport {
  std::vector<AugmentationGroupReport> groups;
  AugmentationGroupReport total;
  std::string ToJsonText() const;
};

struct AugmentationResult {
  std::vector<AugmentedExample> examples;  // in (group, iteration, rank) order
  AugmentationReport report;
};

// Self-training step 2: for every MR size (or act/size pair) and iteration,
// sample an MR, draw n noise-injection samples from p0, keep the top k by
// avg_ll, drop surfaces already generated (and, by default, training
// references), and keep the pairs whose parse is valid. Iterations run in a
// fixed order, so the result is a function of the config and seeds; workers
// only parallelize the draws of one batch.
AugmentationResult BuildAugmentation(const Seq2SeqModel& p0, const MrParser& parser,
                                     const Dataset& train, const SelfTrainConfig& cfg,
                                     std::ostream* progress = nullptr);

struct AugmentationAudit {
  std::size_t examples = 0;
  std::size_t reparse_mismatches = 0;
  std::size_t duplicate_surfaces = 0;
  std::size_t training_collisions = 0;
  std::size_t schema_violations = 0;
  bool ok() const {
    return reparse_mismatches == 0 && duplicate_surfaces == 0 && training_collisions == 0 &&
           schema_violations == 0;
  }
};

// Re-parses every example and checks the dedup and schema invariants.
AugmentationAudit AuditAugmentation(const std::vector<AugmentedExample>& aug,
                                    const MrParser& parser, const Dataset& train,
                                    InputMode mode);

// Training references in the surface form used for dedup (delexicalized
// when `mode` delexicalizes).
std::vector<std::string> TrainingSurfaces(const Dataset& train, InputMode mode);

// The augmentation set in the corpus format of `schema` (E2E CSV or DA JSON) plus a JSON-lines
// provenance sidecar, one line per example in the same order.
void WriteAugmentation(const std::string& corpus_path, const std::string& provenance_path,
                       const std::vector<AugmentedExample>& aug, const DomainSchema& schema);
std::string ProvenanceLine(const AugmentedExample& ex);

// Training data plus augmentation: the training examples followed by one single-reference example per
// augmented pair whose surface does not repeat a training reference.
Dataset UnionDataset(const Dataset& train, const std::vector<AugmentedExample>& aug);

// Self-training step 3: a fresh generator trained on UnionDataset with the
// p0 recipe.
TrainResult Retrain(const Dataset& train, const std::vector<AugmentedExample>& aug,
                    const Dataset& valid, InputMode mode, const TrainConfig& cfg,
                    const ModelConfig& model_cfg, std::ostream* log = nullptr);

}  // namespace selfgen

#endif  // SELFGEN_SELFTRAIN_AUGMENT_H_
