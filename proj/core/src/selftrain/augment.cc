#include "selfgen/selftrain/augment.h"

#include <fstream>
#include <iostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/tokenizer.h"
#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "selfgen/selftrain/sampling.h"

namespace selfgen {
namespace {

struct Group {
  std::string name;
  std::uint64_t key;
  std::string act;  // empty for fixed-position sampling
  std::size_t size;
};

std::vector<Group> Groups(const DomainSchema& schema, const Dataset& train,
                          const SelfTrainConfig& cfg) {
  std::vector<Group> groups;
  if (schema.style() == LinearizationStyle::kFixedPosition) {
    for (std::size_t s = cfg.min_size; s <= cfg.max_size; ++s) {
      groups.push_back({"size=" + std::to_string(s), s, "", s});
    }
    return groups;
  }
  const LegalityTable legal = LegalityTable::Build(train);
  for (std::size_t a = 0; a < schema.acts().size(); ++a) {
    const std::string& act = schema.acts()[a].name;
    auto it = legal.sizes().find(act);
    if (it == legal.sizes().end()) continue;
    for (std::size_t s : it->second) {
      groups.push_back({act + "/size=" + std::to_string(s), (a + 1) * 1000 + s, act, s});
    }
  }
  return groups;
}

void Add(AugmentationGroupReport& into, const AugmentationGroupReport& g) {
  into.iterations += g.iterations;
  into.drawn += g.drawn;
  into.retained += g.retained;
  into.deduped += g.deduped;
  into.rejected += g.rejected;
  into.kept += g.kept;
}

nlohmann::json GroupJson(const AugmentationGroupReport& g) {
  return {{"group", g.group},       {"iterations", g.iterations}, {"drawn", g.drawn},
          {"retained", g.retained}, {"deduped", g.deduped},       {"rejected", g.rejected},
          {"kept", g.kept}};
}

}  // namespace

void SelfTrainConfig::Validate(const DomainSchema& schema) const {
  if (samples_per_mr == 0) throw ConfigError("samples_per_mr must be >= 1");
  if (keep_k == 0) throw ConfigError("keep_k must be >= 1");
  if (sigma0 < 0.0) throw ConfigError("sigma0 must be >= 0");
  if (classifier_threshold < 0.0 || classifier_threshold > 1.0) {
    throw ConfigError("classifier threshold must be in [0, 1]");
  }
  if (schema.style() == LinearizationStyle::kFixedPosition) {
    const std::size_t lo = schema.DefaultAct().required.size() + 1;
    const std::size_t hi = schema.attributes().size();
    if (min_size > max_size || min_size < lo || max_size > hi) {
      throw ConfigError("size range [" + std::to_string(min_size) + ", " +
                        std::to_string(max_size) + "] invalid for schema '" + schema.name() +
                        "' (allowed " + std::to_string(lo) + ".." + std::to_string(hi) + ")");
    }
  }
}

std::vector<std::string> TrainingSurfaces(const Dataset& train, InputMode mode) {
  const std::set<std::string> delex = DelexAttributes(train.schema, mode);
  std::vector<std::string> out;
  for (const Example& ex : train.examples) {
    for (const Utterance& u : ex.refs) {
      try {
        out.push_back(Detokenize(Delexicalize(u, ex.mr, train.schema, delex).first.tokens));
      } catch (const DelexMissError&) {
        out.push_back(Detokenize(u.tokens));
      }
    }
  }
  return out;
}

AugmentationResult BuildAugmentation(const Seq2SeqModel& p0, const MrParser& parser,
                                     const Dataset& train, const SelfTrainConfig& cfg,
                                     std::ostream* progress) {
  const DomainSchema& schema = train.schema;
  cfg.Validate(schema);
  const InputMode mode = p0.mode();
  const std::set<std::string> delex = DelexAttributes(schema, mode);
  const AttributeFrequencyTable freq = AttributeFrequencyTable::Build(train);
  const LegalityTable legal = LegalityTable::Build(train);
  const NoiseSpec spec{cfg.sigma0, cfg.rescore_clean};

  std::unordered_set<std::string> training;
  if (cfg.dedup_against_training) {
    for (std::string& s : TrainingSurfaces(train, mode)) training.insert(std::move(s));
  }
  SeenSet global;
  if (cfg.dedup_within_run) {
    for (const std::string& s : training) global.Insert(s);
  }

  AugmentationResult result;
  result.report.total.group = "all";
  for (const Group& group : Groups(schema, train, cfg)) {
    AugmentationGroupReport rep;
    rep.group = group.name;
    for (std::size_t it = 0; it < cfg.iterations_per_size; ++it) {
      RngStream mr_rng(MixSeed(cfg.seed, group.key, it, 1));
      const MeaningRepresentation mr =
          group.act.empty() ? SampleE2eMr(schema, group.size, freq, mr_rng)
                            : SampleDaMr(schema, group.act, group.size, legal, mr_rng);
      const LinearizedInput input = Linearize(mr, schema, mode);
      const std::uint64_t batch_seed = MixSeed(cfg.seed, group.key, it, 2);

      SeenSet local;
      SeenSet& seen = cfg.dedup_within_run ? global : local;
      SampleBatch batch = SampleBatchTopK(p0, input, spec, batch_seed, cfg.samples_per_mr,
                                          cfg.keep_k, seen, cfg.workers);
      ++rep.iterations;
      rep.drawn += batch.draws.size();
      rep.retained += batch.retained_topk;
      rep.deduped += batch.deduped;

      const DelexMapping bindings = PlaceholderBindings(mr, schema, delex);
      for (const DecodedSample& s : batch.kept) {
        if (!cfg.dedup_within_run && training.count(s.Surface())) {
          ++rep.deduped;
          continue;
        }
        Utterance generated = Utterance::FromTokens(s.tokens);
        const ParseOutcome outcome = parser.Parse(generated, &bindings);
        if (!outcome.valid) {
          ++rep.rejected;
          continue;
        }
        AugmentedExample ex;
        ex.mr = *outcome.mr;
        ex.utt = Relexicalize(generated, bindings);
        ex.generated = std::move(generated);
        ex.bindings = bindings;
        ex.provenance = {batch_seed, cfg.sigma0, mr, s.avg_ll, s.sample_index, group.name, it};
        result.examples.push_back(std::move(ex));
        ++rep.kept;
      }
    }
    if (progress != nullptr) {
      *progress << "augment " << rep.group << ": iterations " << rep.iterations << " drawn "
                << rep.drawn << " retained " << rep.retained << " deduped " << rep.deduped
                << " rejected " << rep.rejected << " kept " << rep.kept << "\n";
    }
    Add(result.report.total, rep);
    result.report.groups.push_back(std::move(rep));
  }
  return result;
}

std::string AugmentationReport::ToJsonText() const {
  nlohmann::json j;
  j["groups"] = nlohmann::json::array();
  for (const AugmentationGroupReport& g : groups) j["groups"].push_back(GroupJson(g));
  j["total"] = GroupJson(total);
  return j.dump(2) + "\n";
}

AugmentationAudit AuditAugmentation(const std::vector<AugmentedExample>& aug,
                                    const MrParser& parser, const Dataset& train,
                                    InputMode mode) {
  AugmentationAudit audit;
  std::unordered_set<std::string> training;
  for (std::string& s : TrainingSurfaces(train, mode)) training.insert(std::move(s));
  std::unordered_set<std::string> seen;
  for (const AugmentedExample& ex : aug) {
    ++audit.examples;
    const ParseOutcome p = parser.Parse(ex.generated, &ex.bindings);
    if (!p.valid || !SameMr(*p.mr, ex.mr)) ++audit.reparse_mismatches;
    const std::string surface = Detokenize(ex.generated.tokens);
    if (!seen.insert(surface).second) ++audit.duplicate_surfaces;
    if (training.count(surface)) ++audit.training_collisions;
    if (!IsValidMr(ex.mr, train.schema)) ++audit.schema_violations;
  }
  return audit;
}

std::string ProvenanceLine(const AugmentedExample& ex) {
  nlohmann::json j;
  j["mr"] = SerializeMr(ex.mr);
  j["text"] = ex.utt.raw;
  j["generated"] = ex.generated.raw;
  j["source_mr"] = SerializeMr(ex.provenance.source);
  j["seed"] = ex.provenance.seed;
  j["sigma0"] = ex.provenance.sigma0;
  j["avg_ll"] = ex.provenance.avg_ll;
  j["sample_index"] = ex.provenance.sample_index;
  j["group"] = ex.provenance.group;
  j["iteration"] = ex.provenance.iteration;
  return j.dump();
}

void WriteAugmentation(const std::string& corpus_path, const std::string& provenance_path,
                       const std::vector<AugmentedExample>& aug, const DomainSchema& schema) {
  std::ofstream corpus(corpus_path, std::ios::binary);
  if (!corpus) throw Error("cannot write augmentation corpus '" + corpus_path + "'");
  if (schema.style() == LinearizationStyle::kFixedPosition) {
    std::vector<Example> examples;
    for (const AugmentedExample& ex : aug) examples.push_back({ex.mr, {ex.utt}});
    corpus << FormatE2eCorpus(examples);
  } else {
    nlohmann::json j = nlohmann::json::array();
    for (const AugmentedExample& ex : aug) {
      j.push_back({{"mr", SerializeMr(ex.mr)}, {"refs", {ex.utt.raw}}});
    }
    corpus << j.dump(1) << "\n";
  }
  std::ofstream side(provenance_path, std::ios::binary);
  if (!side) throw Error("cannot write provenance file '" + provenance_path + "'");
  for (const AugmentedExample& ex : aug) side << ProvenanceLine(ex) << "\n";
}

Dataset UnionDataset(const Dataset& train, const std::vector<AugmentedExample>& aug) {
  Dataset out = train;
  std::unordered_set<std::string> refs;
  for (const Example& ex : train.examples) {
    for (const Utterance& u : ex.refs) refs.insert(Detokenize(u.tokens));
  }
  for (const AugmentedExample& ex : aug) {
    if (!refs.insert(Detokenize(ex.utt.tokens)).second) continue;
    out.examples.push_back({ex.mr, {ex.utt}});
  }
  return out;
}

TrainResult Retrain(const Dataset& train, const std::vector<AugmentedExample>& aug,
                    const Dataset& valid, InputMode mode, const TrainConfig& cfg,
                    const ModelConfig& model_cfg, std::ostream* log) {
  return Train(UnionDataset(train, aug), valid, mode, cfg, model_cfg, std::nullopt, log);
}

}  // namespace selfgen
