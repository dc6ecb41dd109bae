#ifndef SELFGEN_PIPELINE_CONFIG_H_
#define SELFGEN_PIPELINE_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfgen/corpus/linearize.h"
#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/parser.h"
#include "selfgen/selftrain/augment.h"
#include "selfgen/seq2seq/model.h"
#include "selfgen/seq2seq/train.h"

namespace selfgen {

struct DataPaths {
  std::string schema;
  std::string train;
  std::string valid;
  std::string test;
  std::string rules;          // rule pack; required for parsing and evaluation
  std::string normalization;  // optional MR corrections
};

enum class DecodeStrategy { kGreedy, kBeam, kSample, kNoise };

std::string DecodeStrategyName(DecodeStrategy s);
DecodeStrategy ParseDecodeStrategy(const std::string& name);

struct DecodeOptions {
  DecodeStrategy strategy = DecodeStrategy::kGreedy;
  std::size_t width = 8;      // beam
  double temperature = 1.0;   // ancestral sampling
  double sigma0 = 1.0;        // noise injection
  bool rescore_clean = false;
  std::size_t n = 1;          // noise draws per MR; > 1 writes the top k
  std::size_t k = 1;
  std::uint64_t seed = 1;
};

// Everything a run needs. JSON layout:
//
//   {"data": {"schema", "train", "valid", "test", "rules", "normalization"},
//    "mode": "e2e-delex", "output_dir": "runs/x", "workers": 1,
//    "model": {...}, "train": {...}, "retrain": {"epochs"},
//    "selftrain": {...}, "classifier": {...}, "decode": {...},
//    "evaluate": {"error_budget"}}
//
// Unknown keys are errors. Relative paths resolve against the directory of
// the file they come from.
struct PipelineConfig {
  DataPaths data;
  InputMode mode = InputMode::kE2eDelex;
  std::string output_dir = "runs/default";
  std::size_t workers = 1;
  ModelConfig model;
  TrainConfig train;
  std::size_t retrain_epochs = 50;
  SelfTrainConfig selftrain;
  ClassifierConfig classifier;
  DecodeOptions decode;
  std::optional<std::size_t> error_budget;

  // `overrides` are (dotted.key, value) pairs applied on top of the file;
  // values are read as JSON and fall back to plain strings.
  static PipelineConfig FromJsonText(
      const std::string& text, const std::string& base_dir,
      const std::vector<std::pair<std::string, std::string>>& overrides = {});
  static PipelineConfig LoadFile(
      const std::string& path,
      const std::vector<std::pair<std::string, std::string>>& overrides = {});

  // Fully resolved form; loading it back yields the same config.
  std::string ToJsonText() const;
  void Validate() const;  // throws ConfigError
};

}  // namespace selfgen

#endif  // SELFGEN_PIPELINE_CONFIG_H_
