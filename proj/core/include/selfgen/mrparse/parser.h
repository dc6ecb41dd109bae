#ifndef SELFGEN_MRPARSE_PARSER_H_
#define SELFGEN_MRPARSE_PARSER_H_

#include <string_view>

#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/rule_pack.h"

namespace selfgen {

enum class ParserChoice { kRules, kClassifier };

std::string_view ParserChoiceName(ParserChoice choice);  // "rules" / "classifier"
ParserChoice ParseParserChoice(std::string_view name);   // throws ConfigError

// Non-owning handle on either parser; the referenced parser must outlive it.
class MrParser {
 public:
  static MrParser Rules(const RulePack& pack) { return MrParser(&pack, nullptr, 0.0); }
  static MrParser Classifier(const ClassifierParser& clf, double threshold = 0.5) {
    return MrParser(nullptr, &clf, threshold);
  }

  ParserChoice choice() const { return rules_ ? ParserChoice::kRules : ParserChoice::kClassifier; }
  ParseOutcome Parse(const Utterance& utt, const DelexMapping* bindings = nullptr) const {
    return rules_ ? RuleParse(utt, *rules_, bindings) : ClfParse(utt, *clf_, threshold_, bindings);
  }

 private:
  MrParser(const RulePack* r, const ClassifierParser* c, double t)
      : rules_(r), clf_(c), threshold_(t) {}

  const RulePack* rules_;
  const ClassifierParser* clf_;
  double threshold_;
};

}  // namespace selfgen

#endif  // SELFGEN_MRPARSE_PARSER_H_
