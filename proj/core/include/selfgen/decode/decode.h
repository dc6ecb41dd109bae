#ifndef SELFGEN_DECODE_DECODE_H_
#define SELFGEN_DECODE_DECODE_H_

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "selfgen/corpus/linearize.h"
#include "selfgen/neural/rng.h"
#include "selfgen/seq2seq/model.h"

namespace selfgen {

struct DecodedSample {
  std::vector<std::size_t> ids;         // includes EOS when terminated
  std::vector<std::string> tokens;      // surface form, EOS stripped
  std::vector<double> token_logprobs;   // one per id
  double avg_ll = 0.0;                  // mean of token_logprobs
  bool terminated = false;              // reached EOS before the length cap
  std::uint64_t sample_index = 0;       // position within a batch draw

  std::string Surface() const;
};

// Log-probabilities over the output vocabulary with <pad> and <s> excluded
// (they are never emitted).
Vec DecodeLogProbs(const Seq2SeqModel& model, std::span<const double> logits);

DecodedSample Greedy(const Seq2SeqModel& model, const LinearizedInput& input);

// Hypotheses ranked by average log-likelihood; hypotheses that emit EOS are
// retired and compete with the rest on the same score. Returns up to
// `width` samples, best first.
std::vector<DecodedSample> Beam(const Seq2SeqModel& model,
                                const LinearizedInput& input, std::size_t width);

// Draws each token from softmax(logits / temperature). Temperatures below
// 1e-6 decode greedily.
DecodedSample AncestralSample(const Seq2SeqModel& model, const LinearizedInput& input,
                              double temperature, RngStream& rng);

struct NoiseSpec {
  double sigma0 = 1.0;
  // Score kept samples under the clean model instead of the perturbed step
  // distributions that selected them.
  bool rescore_clean = false;
};

// Step-`step` (1-based) perturbation: `dim` independent N(0, sigma0^2/step).
Vec DrawNoise(double sigma0, std::size_t step, std::size_t dim, RngStream& rng);

// Greedy argmax over decoder states perturbed by DrawNoise at every step.
DecodedSample NoiseInjectSample(const Seq2SeqModel& model, const LinearizedInput& input,
                                const NoiseSpec& spec, RngStream& rng);

// Surface sequences already generated. Insertion is serialized.
class SeenSet {
 public:
  // False when the key was already present.
  bool Insert(const std::string& surface);
  bool Contains(const std::string& surface) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_set<std::string> keys_;
};

struct SampleBatch {
  std::vector<DecodedSample> draws;  // all n, in sample-index order
  std::vector<DecodedSample> kept;   // survivors, best avg_ll first
  std::size_t retained_topk = 0;     // min(k, n)
  std::size_t deduped = 0;           // retained but already seen
};

// Draws n noise-injection samples, sample i from RngStream(seed, i), keeps
// the k with the largest avg_ll (ties: lower sample index), then drops
// those whose surface is in `seen` or repeats within the batch. Survivors are
// inserted into `seen`. `workers` > 1 spreads draws over threads without
// changing the result.
SampleBatch SampleBatchTopK(const Seq2SeqModel& model, const LinearizedInput& input,
                            const NoiseSpec& spec, std::uint64_t seed, std::size_t n,
                            std::size_t k, SeenSet& seen, std::size_t workers = 1);

// One line of a sample dump: {"mr", "text", "avg_ll", "sigma0", "seed",
// "sample_index"}.
std::string SampleDumpLine(const std::string& mr, const std::string& text,
                           const DecodedSample& sample, double sigma0,
                           std::uint64_t seed);

}  // namespace selfgen

#endif  // SELFGEN_DECODE_DECODE_H_
