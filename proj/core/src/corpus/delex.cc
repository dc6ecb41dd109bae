#include "selfgen/corpus/delex.h"

#include <algorithm>
#include <map>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {

DelexMapping PlaceholderBindings(const MeaningRepresentation& mr,
                                 const DomainSchema& schema,
                                 const std::set<std::string>& attributes) {
  DelexMapping mapping;
  std::map<std::string, int> seen;
  for (const Slot& s : mr.slots) {
    if (!attributes.count(s.attribute)) continue;
    const AttributeDef& def = schema.Attribute(s.attribute);
    const std::size_t total = mr.Count(s.attribute);
    std::string ph = def.placeholder;
    if (total > 1) ph += "_" + std::to_string(++seen[s.attribute]);
    mapping.push_back({ph, s.attribute, s.value});
  }
  return mapping;
}

const DelexEntry* FindBinding(const DelexMapping& mapping,
                              const std::string& placeholder) {
  for (const DelexEntry& e : mapping) {
    if (e.placeholder == placeholder) return &e;
  }
  return nullptr;
}

std::pair<Utterance, DelexMapping> Delexicalize(
    const Utterance& utt, const MeaningRepresentation& mr,
    const DomainSchema& schema, const std::set<std::string>& attributes) {
  DelexMapping mapping = PlaceholderBindings(mr, schema, attributes);
  if (mapping.empty()) return {utt, mapping};

  // Longer values first so "the rice boat" wins over "rice".
  std::vector<std::size_t> order(mapping.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<std::string>> value_tokens;
  for (const DelexEntry& e : mapping) value_tokens.push_back(Tokenize(e.value));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return value_tokens[a].size() > value_tokens[b].size();
  });

  std::vector<std::string> tokens = utt.tokens;
  for (std::size_t idx : order) {
    const auto& needle = value_tokens[idx];
    if (needle.empty()) throw DelexMissError(mapping[idx].attribute);
    std::vector<std::string> out;
    bool found = false;
    for (std::size_t i = 0; i < tokens.size();) {
      if (i + needle.size() <= tokens.size() &&
          std::equal(needle.begin(), needle.end(), tokens.begin() + i)) {
        out.push_back(mapping[idx].placeholder);
        i += needle.size();
        found = true;
      } else {
        out.push_back(tokens[i++]);
      }
    }
    if (!found) throw DelexMissError(mapping[idx].attribute);
    tokens = std::move(out);
  }
  return {Utterance::FromTokens(std::move(tokens)), std::move(mapping)};
}

Utterance Relexicalize(const Utterance& utt, const DelexMapping& mapping) {
  std::vector<std::string> tokens;
  for (const std::string& t : utt.tokens) {
    const DelexEntry* e = IsPlaceholderToken(t) ? FindBinding(mapping, t) : nullptr;
    if (e == nullptr) {
      tokens.push_back(t);
      continue;
    }
    for (std::string& v : Tokenize(e->value)) tokens.push_back(std::move(v));
  }
  return Utterance::FromTokens(std::move(tokens));
}

}  // namespace selfgen
