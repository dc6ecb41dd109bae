#include "selfgen/corpus/vocab.h"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/delex.h"
#include "selfgen/errors.h"

namespace selfgen {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw Error("duplicate vocab token '" + tokens_[i] + "'");
    }
  }
}

bool Vocab::Contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

std::size_t Vocab::Index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  return unk();
}

std::size_t Vocab::IndexOrThrow(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    throw Error("token '" + std::string(token) + "' not in vocabulary");
  }
  return it->second;
}

std::string Vocab::ToJsonText() const {
  std::string out = "{\n  \"tokens\": [\n";
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += "    " + nlohmann::json(tokens_[i]).dump();
    out += i + 1 < tokens_.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

Vocab Vocab::FromJsonText(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    return Vocab(j.at("tokens").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed vocab file: ") + e.what());
  }
}

Vocab VocabFromCounts(const std::vector<std::pair<std::string, std::size_t>>& counts,
                      const std::vector<std::string>& specials) {
  auto sorted = counts;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens = specials;
  for (auto& [tok, n] : sorted) {
    if (std::find(specials.begin(), specials.end(), tok) == specials.end()) {
      tokens.push_back(tok);
    }
  }
  return Vocab(std::move(tokens));
}

Vocab BuildOutputVocab(const std::vector<std::vector<std::string>>& targets) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : targets) {
    for (const auto& tok : t) ++counts[tok];
  }
  return VocabFromCounts({counts.begin(), counts.end()},
                         {std::string(kPadToken), std::string(kBosToken),
                          std::string(kEosToken), std::string(kUnkToken)});
}

VocabPair BuildVocab(const Dataset& ds, InputMode mode) {
  std::map<std::string, std::size_t> in_counts;
  for (const std::string& t : AllInputTokens(ds.schema, mode)) in_counts[t] = 0;
  const std::set<std::string> delex = DelexAttributes(ds.schema, mode);
  std::vector<std::vector<std::string>> targets;
  for (const Example& ex : ds.examples) {
    for (const std::string& t : Linearize(ex.mr, ds.schema, mode).tokens) {
      ++in_counts[t];
    }
    for (const Utterance& u : ex.refs) {
      try {
        targets.push_back(Delexicalize(u, ex.mr, ds.schema, delex).first.tokens);
      } catch (const DelexMissError&) {
      }
    }
  }
  return {VocabFromCounts({in_counts.begin(), in_counts.end()},
                          {std::string(kPadToken), std::string(kUnkToken)}),
          BuildOutputVocab(targets)};
}

}  // namespace selfgen
