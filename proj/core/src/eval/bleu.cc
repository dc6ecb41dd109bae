#include "selfgen/eval/bleu.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts Ngrams(const TokenSeq& seq, std::size_t n) {
  NgramCounts counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    ++counts[std::vector<std::string>(seq.begin() + i, seq.begin() + i + n)];
  }
  return counts;
}

std::size_t ClosestRefLength(std::size_t hyp_len, const std::vector<TokenSeq>& refs) {
  std::size_t best = refs.front().size();
  for (const TokenSeq& r : refs) {
    const auto d = [&](std::size_t len) {
      return len > hyp_len ? len - hyp_len : hyp_len - len;
    };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) {
      best = r.size();
    }
  }
  return best;
}

}  // namespace

BleuDetail CorpusBleuDetail(const std::vector<TokenSeq>& hyps,
                            const std::vector<std::vector<TokenSeq>>& refs,
                            const BleuOptions& opts) {
  if (hyps.size() != refs.size()) {
    throw ContractError("BLEU needs one reference set per hypothesis");
  }
  if (opts.max_n == 0) throw ContractError("BLEU max_n must be >= 1");
  BleuDetail d;
  d.matches.assign(opts.max_n, 0);
  d.totals.assign(opts.max_n, 0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs[i].empty()) throw ContractError("empty reference set");
    d.hyp_length += hyps[i].size();
    d.ref_length += ClosestRefLength(hyps[i].size(), refs[i]);
    for (std::size_t n = 1; n <= opts.max_n; ++n) {
      const NgramCounts h = Ngrams(hyps[i], n);
      NgramCounts max_ref;
      for (const TokenSeq& r : refs[i]) {
        for (const auto& [g, c] : Ngrams(r, n)) {
          max_ref[g] = std::max(max_ref[g], c);
        }
      }
      for (const auto& [g, c] : h) {
        d.totals[n - 1] += c;
        auto it = max_ref.find(g);
        if (it != max_ref.end()) d.matches[n - 1] += std::min(c, it->second);
      }
    }
  }
  if (d.hyp_length == 0) return d;

  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < opts.max_n; ++n) {
    if (d.totals[n] == 0) continue;
    double num = static_cast<double>(d.matches[n]);
    double den = static_cast<double>(d.totals[n]);
    if (opts.smooth && n > 0) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0.0) return d;  // a zero precision zeroes the geometric mean
    log_sum += std::log(num / den);
    ++orders;
  }
  d.brevity_penalty =
      d.hyp_length >= d.ref_length
          ? 1.0
          : std::exp(1.0 - static_cast<double>(d.ref_length) / d.hyp_length);
  d.score = 100.0 * d.brevity_penalty * std::exp(log_sum / orders);
  return d;
}

double CorpusBleu(const std::vector<TokenSeq>& hyps,
                  const std::vector<std::vector<TokenSeq>>& refs, const BleuOptions& opts) {
  return CorpusBleuDetail(hyps, refs, opts).score;
}

std::size_t CountWords(const TokenSeq& tokens) {
  return std::count_if(tokens.begin(), tokens.end(),
                       [](const std::string& t) { return !IsPunctuationToken(t); });
}

std::size_t CountSentences(const TokenSeq& tokens) {
  std::size_t sentences = 0;
  bool open = false;
  for (const std::string& t : tokens) {
    if (IsSentenceTerminal(t)) {
      if (open) ++sentences;
      open = false;
    } else {
      open = true;
    }
  }
  if (open) ++sentences;
  return tokens.empty() ? 0 : std::max<std::size_t>(sentences, 1);
}

SurfaceStats ComputeSurfaceStats(const std::vector<Utterance>& utts) {
  SurfaceStats s;
  s.items = utts.size();
  if (utts.empty()) return s;
  double words = 0.0;
  double sentences = 0.0;
  for (const Utterance& u : utts) {
    words += CountWords(u.tokens);
    sentences += CountSentences(u.tokens);
  }
  s.mean_words = words / utts.size();
  s.mean_sentences = sentences / utts.size();
  return s;
}

}  // namespace selfgen
