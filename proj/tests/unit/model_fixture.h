#ifndef SELFGEN_TESTS_MODEL_FIXTURE_H_
#define SELFGEN_TESTS_MODEL_FIXTURE_H_

#include <string>
#include <vector>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/vocab.h"
#include "selfgen/neural/rng.h"
#include "selfgen/seq2seq/model.h"
#include "test_util.h"

namespace selfgen::testing {

// Uniformly random valid E2E MR: name always, every other attribute with
// probability 1/2.
inline MeaningRepresentation RandomE2eMr(RngStream& rng) {
  MeaningRepresentation mr{"inform", {}};
  for (const AttributeDef& a : E2eSchema().attributes()) {
    if (a.name != "name" && rng.Uniform() < 0.5) continue;
    mr.slots.push_back({a.name, a.values[rng.Below(a.values.size())]});
  }
  return mr;
}

inline std::vector<std::vector<std::string>> SmallTargets() {
  return {{"NAME", "is", "a", "pub", "."},
          {"NAME", "serves", "italian", "food", "near", "NEAR", "."},
          {"a", "cheap", "family", "friendly", "restaurant", "in", "the", "city", "centre", "."}};
}

// Random E2E delex model with `dim`-sized embeddings and states.
inline Seq2SeqModel SmallE2eModel(std::size_t dim, std::uint64_t seed,
                                  double init_scale = 0.5) {
  Dataset ds{E2eSchema(), {}, Split::kTrain};
  const VocabPair v = BuildVocab(ds, InputMode::kE2eDelex);
  ModelConfig cfg;
  cfg.embed_dim = dim;
  cfg.hidden_dim = dim;
  cfg.init_scale = init_scale;
  cfg.max_decode_length = 20;
  Seq2SeqModel m(cfg, v.input, BuildOutputVocab(SmallTargets()), InputMode::kE2eDelex);
  m.Initialize(seed);
  return m;
}

}  // namespace selfgen::testing

#endif  // SELFGEN_TESTS_MODEL_FIXTURE_H_
