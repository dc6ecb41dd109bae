#ifndef SELFGEN_EVAL_SLOT_ERRORS_H_
#define SELFGEN_EVAL_SLOT_ERRORS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/eval/bleu.h"
#include "selfgen/mrparse/rule_pack.h"

namespace selfgen {

enum class SlotErrorKind { kMissing, kWrong, kHallucinated };

std::string SlotErrorKindName(SlotErrorKind kind);

struct SlotErrorDetail {
  std::size_t item = 0;
  std::string attribute;
  SlotErrorKind kind = SlotErrorKind::kMissing;
  std::string expected;  // empty for hallucinations
  std::string found;     // empty for omissions
};

struct AttributeSlotErrors {
  std::string attribute;
  std::string label;
  std::size_t missing = 0;
  std::size_t wrong = 0;
  std::size_t hallucinated = 0;

  std::size_t total() const { return missing + wrong + hallucinated; }
};

struct SlotErrorReport {
  std::vector<AttributeSlotErrors> attributes;  // report order
  std::vector<SlotErrorDetail> details;
  std::size_t items = 0;
  std::size_t total = 0;

  const AttributeSlotErrors* Find(const std::string& attribute) const;
  // Rows missing / wrong / hallucinated / total, one column per attribute
  // plus "All".
  std::string ToTable() const;
  std::string ToJsonText() const;
};

struct GeneratedOutput {
  MeaningRepresentation mr;
  Utterance utt;
  DelexMapping bindings;  // for outputs that still carry placeholders
};

// Lenient parse of each output against its MR. Per attribute, MR values the
// parse does not find are omissions, parsed values outside the MR are wrong
// values when the MR has the attribute and hallucinations otherwise. One
// wrong value pairs off with one omission.
SlotErrorReport SlotErrors(const std::vector<GeneratedOutput>& outputs,
                           const RulePack& pack);

struct QualityReport {
  double bleu = 0.0;
  SurfaceStats surface;
  std::vector<std::string> omitted{"METEOR", "ROUGE-L", "D-Level"};

  std::string ToText() const;
  std::string ToJsonText() const;
};

QualityReport Quality(const std::vector<TokenSeq>& hyps,
                      const std::vector<std::vector<TokenSeq>>& refs,
                      const std::vector<Utterance>& outputs);

}  // namespace selfgen

#endif  // SELFGEN_EVAL_SLOT_ERRORS_H_
