#ifndef SELFGEN_MRPARSE_TEMPLATES_H_
#define SELFGEN_MRPARSE_TEMPLATES_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/schema.h"

namespace selfgen {

// One phrase per (attribute, value) for fixed-position domains:
//
//   {"subject": "name",
//    "phrases": {"food": {"Italian": "serves italian food", ...}, ...}}
//
// An MR is realized as "<subject value> <phrase>, <phrase> and <phrase> ."
// with phrases in canonical attribute order.
class TemplateSet {
 public:
  static TemplateSet FromJsonText(std::string_view text, const DomainSchema& schema);
  static TemplateSet LoadFile(const std::string& path, const DomainSchema& schema);

  const DomainSchema& schema() const { return schema_; }
  const std::string& subject() const { return subject_; }
  Utterance Expand(const MeaningRepresentation& mr) const;

 private:
  DomainSchema schema_;
  std::string subject_;
  std::map<std::string, std::map<std::string, std::string>> phrases_;
};

// One example per (attribute, value) of the schema: the first subject value
// plus that single slot, and a subject-only MR for every subject value.
std::vector<Example> ExhaustiveTemplateCorpus(const TemplateSet& templates);

}  // namespace selfgen

#endif  // SELFGEN_MRPARSE_TEMPLATES_H_
