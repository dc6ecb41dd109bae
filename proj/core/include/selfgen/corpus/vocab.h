#ifndef SELFGEN_CORPUS_VOCAB_H_
#define SELFGEN_CORPUS_VOCAB_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/linearize.h"

namespace selfgen {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Token <-> index map. Specials occupy the first indices.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;

  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& Token(std::size_t index) const { return tokens_.at(index); }
  bool Contains(std::string_view token) const;
  // Index of `token`, or the UNK index when absent (throws when the vocab has
  // no UNK entry).
  std::size_t Index(std::string_view token) const;
  std::size_t IndexOrThrow(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::size_t pad() const { return IndexOrThrow(kPadToken); }
  std::size_t bos() const { return IndexOrThrow(kBosToken); }
  std::size_t eos() const { return IndexOrThrow(kEosToken); }
  std::size_t unk() const { return IndexOrThrow(kUnkToken); }

  // {"tokens": [...]} in index order, one token per line.
  std::string ToJsonText() const;
  static Vocab FromJsonText(std::string_view text);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Frequency-sorted (descending, ties lexicographic) vocab after `specials`.
Vocab VocabFromCounts(const std::vector<std::pair<std::string, std::size_t>>& counts,
                      const std::vector<std::string>& specials);

struct VocabPair {
  Vocab input;
  Vocab output;
};

// Input vocab: <pad>, <unk>, then every token the schema can produce under
// `mode` (so sampled novel MRs never hit UNK), ordered by training frequency.
// Output vocab: <pad>, <s>, </s>, <unk>, then every target token of the
// (delexicalized when the mode asks for it) training references. References
// whose delexicalization misses are skipped.
VocabPair BuildVocab(const Dataset& ds, InputMode mode);

// Output vocab from already-prepared target token sequences.
Vocab BuildOutputVocab(const std::vector<std::vector<std::string>>& targets);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_VOCAB_H_
