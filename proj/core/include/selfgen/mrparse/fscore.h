#ifndef SELFGEN_MRPARSE_FSCORE_H_
#define SELFGEN_MRPARSE_FSCORE_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/mr.h"

namespace selfgen {

struct AttributeScore {
  std::string attribute;
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
  double precision = 0.0;  // 0 when nothing was predicted
  double recall = 0.0;     // 0 when nothing was expected
  double f = 0.0;
};

struct ParserScores {
  std::vector<AttributeScore> attributes;  // schema order, attributes with support
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
  std::size_t utterances = 0;
};

// Predicted (attribute, value) slots for one utterance.
using SlotPredictor = std::function<std::vector<Slot>(const Utterance&)>;

// Slot-level scoring of every reference of every example against its MR.
// Attributes that are neither expected nor predicted anywhere are left out
// of the macro average.
ParserScores ParserFScore(const SlotPredictor& parser, const Dataset& ds);

}  // namespace selfgen

#endif  // SELFGEN_MRPARSE_FSCORE_H_
