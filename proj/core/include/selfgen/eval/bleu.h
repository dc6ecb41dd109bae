#ifndef SELFGEN_EVAL_BLEU_H_
#define SELFGEN_EVAL_BLEU_H_

#include <cstddef>
#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"

namespace selfgen {

using TokenSeq = std::vector<std::string>;

struct BleuOptions {
  std::size_t max_n = 4;
  bool smooth = false;  // add-one on orders n > 1
};

struct BleuDetail {
  std::vector<std::size_t> matches;  // clipped, per order
  std::vector<std::size_t> totals;   // hypothesis n-grams, per order
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;        // closest reference length, summed
  double brevity_penalty = 1.0;
  double score = 0.0;                // 0..100
};

// Corpus BLEU with modified n-gram precision (clipped by the maximum count in
// any single reference), geometric mean over orders and a brevity penalty
// against the closest reference length (ties to the shorter). Orders for
// which the corpus has no hypothesis n-grams at all are left out of the mean.
BleuDetail CorpusBleuDetail(const std::vector<TokenSeq>& hyps,
                            const std::vector<std::vector<TokenSeq>>& refs,
                            const BleuOptions& opts = {});
double CorpusBleu(const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs,
                  const BleuOptions& opts = {});

struct SurfaceStats {
  std::size_t items = 0;
  double mean_words = 0.0;
  double mean_sentences = 0.0;
};

// Words are non-punctuation tokens; sentences are segments closed by
// terminal punctuation, at least one per nonempty utterance.
std::size_t CountWords(const TokenSeq& tokens);
std::size_t CountSentences(const TokenSeq& tokens);
SurfaceStats ComputeSurfaceStats(const std::vector<Utterance>& utts);

}  // namespace selfgen

#endif  // SELFGEN_EVAL_BLEU_H_
