#ifndef SELFGEN_MRPARSE_RULE_PACK_H_
#define SELFGEN_MRPARSE_RULE_PACK_H_

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"

namespace selfgen {

struct RulePattern {
  std::string source;  // regex text as written
  std::regex regex;
  std::string value;   // canonical value, or a "$n" capture reference
};

struct AttributeRules {
  std::string attribute;
  std::vector<RulePattern> patterns;
  bool literal = false;      // match every vocabulary value verbatim
  bool placeholder = false;  // match the attribute's placeholder tokens
};

// Surface patterns per attribute and dialogue-act cues, loaded from a text
// file:
//
//   # comment
//   [attribute food]
//   \b(italian|french) (food|cuisine)\b => $1
//   \bfast food\b => Fast food
//   @literal
//   @placeholder
//   [act]
//   \bcompared? to\b => compare
//
// Each rule line is split on its last " => ". Patterns are ECMAScript
// regular expressions run over the space-joined tokens of the utterance
// (lowercase, placeholders uppercase). A value of $n takes capture group n
// and maps it onto the vocabulary case-insensitively. A literal " => "
// inside a pattern is written "=\>".
class RulePack {
 public:
  RulePack() = default;
  static RulePack FromText(std::string_view text, const DomainSchema& schema);
  static RulePack LoadFile(const std::string& path, const DomainSchema& schema);

  const DomainSchema& schema() const { return schema_; }
  const std::vector<AttributeRules>& attributes() const { return attributes_; }
  const std::vector<RulePattern>& act_cues() const { return act_cues_; }
  const AttributeRules* Find(std::string_view attribute) const;

 private:
  DomainSchema schema_;
  std::vector<AttributeRules> attributes_;
  std::vector<RulePattern> act_cues_;
};

struct AttributeEvidence {
  std::string attribute;
  std::vector<std::string> values;  // distinct, in order of first match
  std::vector<std::string> spans;   // matched surface text
  double confidence = 1.0;          // classifier probability of the decision
};

struct ParseOutcome {
  bool valid = false;
  std::optional<MeaningRepresentation> mr;  // set iff valid
  std::string act;                          // detected act, may be empty
  std::vector<AttributeEvidence> evidence;  // attributes with any match
  std::string reason;                       // why the parse is invalid

  const AttributeEvidence* Evidence(std::string_view attribute) const;
};

// Strict parse. An attribute with more distinct values than its act allows
// invalidates the parse; so does a missing required slot, a DA utterance
// without exactly one act cue, or a placeholder with no entry in
// `bindings`. Evidence is filled in either way, with unbound placeholders
// reported by their token.
ParseOutcome RuleParse(const Utterance& utt, const RulePack& pack,
                       const DelexMapping* bindings = nullptr);

// Every evidence value as a slot, conflicts included (lenient reading).
std::vector<Slot> EvidenceSlots(const ParseOutcome& outcome);

// Order-insensitive slot comparison (repeated attributes may be realized
// in any order).
bool SameMr(const MeaningRepresentation& a, const MeaningRepresentation& b);

}  // namespace selfgen

#endif  // SELFGEN_MRPARSE_RULE_PACK_H_
