#include "selfgen/mrparse/fscore.h"

#include <algorithm>
#include <map>

namespace selfgen {

ParserScores ParserFScore(const SlotPredictor& parser, const Dataset& ds) {
  std::map<std::string, AttributeScore> by_attr;
  ParserScores out;
  for (const Example& ex : ds.examples) {
    for (const Utterance& u : ex.refs) {
      ++out.utterances;
      std::vector<Slot> gold = ex.mr.slots;
      std::vector<Slot> pred = parser(u);
      std::sort(gold.begin(), gold.end());
      std::sort(pred.begin(), pred.end());
      std::vector<Slot> hit;
      std::set_intersection(gold.begin(), gold.end(), pred.begin(), pred.end(),
                            std::back_inserter(hit));
      for (const Slot& s : hit) ++by_attr[s.attribute].true_pos;
      std::vector<Slot> diff;
      std::set_difference(pred.begin(), pred.end(), hit.begin(), hit.end(),
                          std::back_inserter(diff));
      for (const Slot& s : diff) ++by_attr[s.attribute].false_pos;
      diff.clear();
      std::set_difference(gold.begin(), gold.end(), hit.begin(), hit.end(),
                          std::back_inserter(diff));
      for (const Slot& s : diff) ++by_attr[s.attribute].false_neg;
    }
  }
  for (const AttributeDef& def : ds.schema.attributes()) {
    auto it = by_attr.find(def.name);
    if (it == by_attr.end()) continue;
    AttributeScore s = it->second;
    s.attribute = def.name;
    const std::size_t predicted = s.true_pos + s.false_pos;
    const std::size_t expected = s.true_pos + s.false_neg;
    s.precision = predicted == 0 ? 0.0 : static_cast<double>(s.true_pos) / predicted;
    s.recall = expected == 0 ? 0.0 : static_cast<double>(s.true_pos) / expected;
    s.f = s.precision + s.recall == 0.0
              ? 0.0
              : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    out.attributes.push_back(s);
  }
  for (const AttributeScore& s : out.attributes) {
    out.macro_precision += s.precision;
    out.macro_recall += s.recall;
    out.macro_f += s.f;
  }
  if (!out.attributes.empty()) {
    const double n = static_cast<double>(out.attributes.size());
    out.macro_precision /= n;
    out.macro_recall /= n;
    out.macro_f /= n;
  }
  return out;
}

}  // namespace selfgen
