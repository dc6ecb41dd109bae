#ifndef SELFGEN_CORPUS_DELEX_H_
#define SELFGEN_CORPUS_DELEX_H_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selfgen/corpus/dataset.h"

namespace selfgen {

struct DelexEntry {
  std::string placeholder;  // NAME, or NAME_1 / NAME_2 for repeated slots
  std::string attribute;
  std::string value;

  friend bool operator==(const DelexEntry&, const DelexEntry&) = default;
};

using DelexMapping = std::vector<DelexEntry>;

// Placeholder bindings for the slots of `attributes` in `mr`. Repeated
// attributes get 1-based indexed placeholders in slot order.
DelexMapping PlaceholderBindings(const MeaningRepresentation& mr,
                                 const DomainSchema& schema,
                                 const std::set<std::string>& attributes);

// Replaces every occurrence of each selected slot value (matched on
// tokens, case-insensitively) with its placeholder. Throws DelexMissError
// naming the first attribute whose value does not occur.
std::pair<Utterance, DelexMapping> Delexicalize(
    const Utterance& utt, const MeaningRepresentation& mr,
    const DomainSchema& schema, const std::set<std::string>& attributes);

// Substitutes placeholder tokens with the tokenized values. Placeholders
// without a binding are left in place.
Utterance Relexicalize(const Utterance& utt, const DelexMapping& mapping);

const DelexEntry* FindBinding(const DelexMapping& mapping,
                              const std::string& placeholder);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_DELEX_H_
