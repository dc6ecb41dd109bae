#ifndef SELFGEN_CORPUS_NORMALIZE_H_
#define SELFGEN_CORPUS_NORMALIZE_H_

#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/dataset.h"

namespace selfgen {

// Adds attribute[value] to MRs lacking the attribute when any reference
// matches `trigger` (a regular expression over the tokenized reference).
struct AmendRule {
  std::string attribute;
  std::string value;
  std::string trigger;
};

// Rewrites attribute[from] to attribute[to]. With `when_numeric` the rule
// fires when some reference mentions a numeric amount; otherwise it fires
// when no reference does. `evidence`, when set, is the regular expression
// that counts as a numeric mention for this attribute; by default any digit
// or pound sign does.
struct RemapRule {
  std::string attribute;
  std::string from;
  std::string to;
  bool when_numeric = true;
  std::string evidence;
};

struct NormalizationConfig {
  std::vector<AmendRule> amend;
  std::vector<RemapRule> remap;

  // JSON with "amend" and "remap" arrays. A remap entry with
  // "symmetric": true also installs the reverse rule (to -> from, opposite
  // condition). Attributes and values are checked against the schema.
  static NormalizationConfig FromJsonText(std::string_view text,
                                          const DomainSchema& schema);
  static NormalizationConfig LoadFile(const std::string& path,
                                      const DomainSchema& schema);
};

struct NormalizationEdit {
  std::size_t example;
  std::string before;
  std::string after;
  std::string rule;
};

struct NormalizationResult {
  Dataset dataset;
  std::vector<NormalizationEdit> edits;
};

// Applies the consistency corrections to train and valid splits. A test
// split is returned untouched with no edits.
NormalizationResult NormalizeDataset(const Dataset& ds,
                                     const NormalizationConfig& rules);

// True when the tokens mention a digit or the pound sign.
bool MentionsNumericAmount(const std::vector<std::string>& tokens);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_NORMALIZE_H_
