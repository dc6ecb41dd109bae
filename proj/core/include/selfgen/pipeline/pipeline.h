#ifndef SELFGEN_PIPELINE_PIPELINE_H_
#define SELFGEN_PIPELINE_PIPELINE_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/schema.h"
#include "selfgen/decode/decode.h"
#include "selfgen/eval/slot_errors.h"
#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/rule_pack.h"
#include "selfgen/pipeline/config.h"
#include "selfgen/selftrain/augment.h"
#include "selfgen/seq2seq/train.h"

namespace selfgen {

struct PipelineData {
  DomainSchema schema;
  Dataset train;
  Dataset valid;
  Dataset test;
  std::optional<RulePack> rules;
  std::size_t normalization_edits = 0;
};

// Loads the splits named in the config (CSV for fixed-position schemas,
// JSON otherwise) and applies the normalization rules to train and valid.
// Empty split paths give empty datasets.
PipelineData LoadPipelineData(const PipelineConfig& cfg, std::ostream* progress = nullptr);

Dataset LoadCorpusFile(const std::string& path, const DomainSchema& schema, Split split);

TrainResult TrainGenerator(const PipelineConfig& cfg, const Dataset& train, const Dataset& valid,
                           std::size_t epochs, std::ostream* log = nullptr);

// Decodes one MR per the decode options. Returns the kept outputs, best
// first (a single one except for noise sampling with k > 1), relexicalized.
std::vector<DecodedSample> DecodeMr(const Seq2SeqModel& model, const MeaningRepresentation& mr,
                                    const DomainSchema& schema, const DecodeOptions& opts,
                                    std::size_t item);

// Greedy outputs for each distinct MR of `ds`, relexicalized.
std::vector<GeneratedOutput> GreedyOutputs(const Seq2SeqModel& model, const Dataset& ds,
                                           std::size_t workers = 1);

struct ModelEvaluation {
  SlotErrorReport slots;
  QualityReport quality;
  std::vector<GeneratedOutput> outputs;
};

// Greedy decoding of every distinct test MR, scored against its references.
ModelEvaluation EvaluateModel(const Seq2SeqModel& model, const Dataset& test,
                              const RulePack& rules, std::size_t workers = 1);

struct SelfTrainRun {
  std::optional<TrainResult> p0;  // always set on return
  std::optional<ClassifierParser> classifier;
  AugmentationResult augmentation;
  AugmentationAudit audit;
  std::optional<TrainResult> p1;
  std::optional<ModelEvaluation> before;
  std::optional<ModelEvaluation> after;
};

// p0 (trained unless given), parser, augmentation, audit, p1 on the union
// and before/after evaluation on the test split. Refuses to retrain on an
// empty augmentation set.
SelfTrainRun RunSelfTraining(const PipelineConfig& cfg, const PipelineData& data,
                             const std::optional<Seq2SeqModel>& p0 = std::nullopt,
                             std::ostream* progress = nullptr);

}  // namespace selfgen

#endif  // SELFGEN_PIPELINE_PIPELINE_H_
