#ifndef SELFGEN_CORPUS_LINEARIZE_H_
#define SELFGEN_CORPUS_LINEARIZE_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/mr.h"

namespace selfgen {

enum class InputMode {
  kE2eLex,      // one token per attribute, values spelled out
  kE2eDelex,    // as above, required placeholder attributes omitted and
                // other placeholder attributes reduced to presence
  kDaVariable,  // act token, then one token per slot
};

std::string_view InputModeName(InputMode mode);
InputMode ParseInputMode(std::string_view name);

struct LinearizedInput {
  std::vector<std::string> tokens;
};

// Total on MRs that pass ValidateMr.
LinearizedInput Linearize(const MeaningRepresentation& mr,
                          const DomainSchema& schema, InputMode mode);

// Attributes replaced by placeholders in the target text under `mode`.
std::set<std::string> DelexAttributes(const DomainSchema& schema, InputMode mode);

// Every token Linearize can emit for the schema under `mode`, sorted.
std::vector<std::string> AllInputTokens(const DomainSchema& schema,
                                        InputMode mode);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_LINEARIZE_H_
