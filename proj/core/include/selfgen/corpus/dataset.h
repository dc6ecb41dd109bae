#ifndef SELFGEN_CORPUS_DATASET_H_
#define SELFGEN_CORPUS_DATASET_H_

#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"

namespace selfgen {

enum class Split { kTrain, kValid, kTest };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct Utterance {
  std::string raw;
  std::vector<std::string> tokens;

  static Utterance FromText(std::string_view text);
  static Utterance FromTokens(std::vector<std::string> tokens);
};

struct Example {
  MeaningRepresentation mr;
  std::vector<Utterance> refs;
};

struct Dataset {
  DomainSchema schema;
  std::vector<Example> examples;
  Split split = Split::kTrain;

  std::size_t NumReferences() const;
};

// Reads the E2E delimiter-separated format: one row per (mr, ref) pair, two
// fields, optionally double-quoted with "" escapes. A first row whose MR
// field is "mr" is treated as a header. Each row becomes one example;
// duplicate rows are kept.
Dataset LoadE2eCorpus(const std::string& path, const DomainSchema& schema,
                      Split split = Split::kTrain);
Dataset ParseE2eCorpus(std::string_view text, const DomainSchema& schema,
                       Split split = Split::kTrain);

// Writes one row per reference with a header; MRs in canonical form.
void WriteE2eCorpus(const std::string& path, const std::vector<Example>& examples);
std::string FormatE2eCorpus(const std::vector<Example>& examples);

// Reads the Laptops/TVs structured format: a JSON array whose records are
// either [da, ref, ref, ...] or {"mr": da, "refs": [...]}. The DA string uses
// act(attr[value], ...) syntax; the legacy act(attr=value;attr=value) form is
// accepted too.
Dataset LoadDaCorpus(const std::string& path, const DomainSchema& schema,
                     Split split = Split::kTrain);
Dataset ParseDaCorpus(std::string_view text, const DomainSchema& schema,
                      Split split = Split::kTrain);

// Merges examples with equal MRs into multi-reference examples, keeping the
// order of first appearance.
std::vector<Example> GroupByMr(const std::vector<Example>& examples);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_DATASET_H_
