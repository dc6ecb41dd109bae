#include "selfgen/pipeline/pipeline.h"

#include <filesystem>
#include <iostream>
#include <thread>

#include "selfgen/corpus/delex.h"
#include "selfgen/corpus/linearize.h"
#include "selfgen/corpus/normalize.h"
#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "selfgen/mrparse/parser.h"
#include "selfgen/neural/rng.h"

namespace selfgen {
namespace {

void Relex(DecodedSample& s, const DelexMapping& bindings) {
  s.tokens = Relexicalize(Utterance::FromTokens(s.tokens), bindings).tokens;
}

}  // namespace

Dataset LoadCorpusFile(const std::string& path, const DomainSchema& schema, Split split) {
  if (path.empty()) {
    Dataset ds;
    ds.schema = schema;
    ds.split = split;
    return ds;
  }
  if (!std::filesystem::exists(path)) {
    throw ConfigError("corpus file '" + path + "' does not exist");
  }
  try {
    return schema.style() == LinearizationStyle::kFixedPosition
               ? LoadE2eCorpus(path, schema, split)
               : LoadDaCorpus(path, schema, split);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

PipelineData LoadPipelineData(const PipelineConfig& cfg, std::ostream* progress) {
  if (cfg.data.schema.empty()) throw ConfigError("config: data.schema is required");
  for (const std::string& p : {cfg.data.schema, cfg.data.rules, cfg.data.normalization}) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw ConfigError("file '" + p + "' does not exist");
    }
  }
  PipelineData d;
  d.schema = DomainSchema::LoadFile(cfg.data.schema);
  d.train = LoadCorpusFile(cfg.data.train, d.schema, Split::kTrain);
  d.valid = LoadCorpusFile(cfg.data.valid, d.schema, Split::kValid);
  d.test = LoadCorpusFile(cfg.data.test, d.schema, Split::kTest);
  if (!cfg.data.normalization.empty()) {
    const NormalizationConfig norm = NormalizationConfig::LoadFile(cfg.data.normalization, d.schema);
    for (Dataset* ds : {&d.train, &d.valid}) {
      NormalizationResult r = NormalizeDataset(*ds, norm);
      d.normalization_edits += r.edits.size();
      *ds = std::move(r.dataset);
    }
    if (progress != nullptr) {
      *progress << "normalization: " << d.normalization_edits << " MR edit(s)\n";
    }
  }
  if (!cfg.data.rules.empty()) d.rules = RulePack::LoadFile(cfg.data.rules, d.schema);
  return d;
}

TrainResult TrainGenerator(const PipelineConfig& cfg, const Dataset& train, const Dataset& valid,
                           std::size_t epochs, std::ostream* log) {
  TrainConfig tc = cfg.train;
  tc.epochs = epochs;
  return Train(train, valid, cfg.mode, tc, cfg.model, std::nullopt, log);
}

std::vector<DecodedSample> DecodeMr(const Seq2SeqModel& model, const MeaningRepresentation& mr,
                                    const DomainSchema& schema, const DecodeOptions& opts,
                                    std::size_t item) {
  const LinearizedInput input = Linearize(mr, schema, model.mode());
  const DelexMapping bindings =
      PlaceholderBindings(mr, schema, DelexAttributes(schema, model.mode()));
  std::vector<DecodedSample> out;
  switch (opts.strategy) {
    case DecodeStrategy::kGreedy:
      out.push_back(Greedy(model, input));
      break;
    case DecodeStrategy::kBeam:
      out.push_back(Beam(model, input, opts.width).front());
      break;
    case DecodeStrategy::kSample: {
      RngStream rng(opts.seed, item);
      out.push_back(AncestralSample(model, input, opts.temperature, rng));
      break;
    }
    case DecodeStrategy::kNoise: {
      const NoiseSpec spec{opts.sigma0, opts.rescore_clean};
      if (opts.n == 1) {
        RngStream rng(opts.seed, item);
        out.push_back(NoiseInjectSample(model, input, spec, rng));
      } else {
        SeenSet seen;
        out = SampleBatchTopK(model, input, spec, MixSeed(opts.seed, item), opts.n, opts.k, seen)
                  .kept;
      }
      break;
    }
  }
  for (DecodedSample& s : out) Relex(s, bindings);
  return out;
}

std::vector<GeneratedOutput> GreedyOutputs(const Seq2SeqModel& model, const Dataset& ds,
                                           std::size_t workers) {
  const std::vector<Example> groups = GroupByMr(ds.examples);
  const std::set<std::string> delex = DelexAttributes(ds.schema, model.mode());
  std::vector<GeneratedOutput> outs(groups.size());
  auto run = [&](std::size_t start, std::size_t stride) {
    for (std::size_t i = start; i < groups.size(); i += stride) {
      const DecodedSample s = Greedy(model, Linearize(groups[i].mr, ds.schema, model.mode()));
      const DelexMapping b = PlaceholderBindings(groups[i].mr, ds.schema, delex);
      outs[i] = {groups[i].mr, Relexicalize(Utterance::FromTokens(s.tokens), b), {}};
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, groups.size()));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (std::thread& t : pool) t.join();
  }
  return outs;
}

ModelEvaluation EvaluateModel(const Seq2SeqModel& model, const Dataset& test,
                              const RulePack& rules, std::size_t workers) {
  if (test.examples.empty()) throw ContractError("test split is empty");
  ModelEvaluation ev;
  ev.outputs = GreedyOutputs(model, test, workers);
  const std::vector<Example> groups = GroupByMr(test.examples);
  std::vector<TokenSeq> hyps;
  std::vector<std::vector<TokenSeq>> refs;
  std::vector<Utterance> utts;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    hyps.push_back(ev.outputs[i].utt.tokens);
    refs.emplace_back();
    for (const Utterance& u : groups[i].refs) refs.back().push_back(u.tokens);
    utts.push_back(ev.outputs[i].utt);
  }
  ev.slots = SlotErrors(ev.outputs, rules);
  ev.quality = Quality(hyps, refs, utts);
  return ev;
}

SelfTrainRun RunSelfTraining(const PipelineConfig& cfg, const PipelineData& data,
                             const std::optional<Seq2SeqModel>& p0, std::ostream* progress) {
  cfg.selftrain.Validate(data.schema);
  if (cfg.selftrain.parser == ParserChoice::kRules && !data.rules) {
    throw ConfigError("self-training with the rule parser needs data.rules");
  }
  SelfTrainRun run;
  if (p0) {
    run.p0 = TrainResult{*p0, {}, 0, 0.0, 0};
  } else {
    if (progress != nullptr) *progress << "training p0\n";
    run.p0 = TrainGenerator(cfg, data.train, data.valid, cfg.train.epochs, progress);
  }
  if (run.p0->model.mode() != cfg.mode) {
    throw ConfigError("p0 was trained in mode " + std::string(InputModeName(run.p0->model.mode())) +
                      " but the config asks for " + std::string(InputModeName(cfg.mode)));
  }

  std::optional<MrParser> parser;
  if (cfg.selftrain.parser == ParserChoice::kClassifier) {
    if (progress != nullptr) *progress << "training classifier parser\n";
    run.classifier =
        ClassifierParser::Train(data.train, data.valid, cfg.mode, cfg.classifier, nullptr, progress);
    parser = MrParser::Classifier(*run.classifier, cfg.selftrain.classifier_threshold);
  } else {
    parser = MrParser::Rules(*data.rules);
  }

  run.augmentation = BuildAugmentation(run.p0->model, *parser, data.train, cfg.selftrain, progress);
  run.audit = AuditAugmentation(run.augmentation.examples, *parser, data.train, cfg.mode);
  if (data.rules && !data.test.examples.empty()) {
    run.before = EvaluateModel(run.p0->model, data.test, *data.rules, cfg.workers);
  }
  if (run.augmentation.examples.empty()) {
    if (progress != nullptr) {
      *progress << "augmentation set is empty; p1 is not trained\n";
    }
    return run;
  }
  if (progress != nullptr) {
    *progress << "training p1 on " << data.train.examples.size() << " + "
              << run.augmentation.examples.size() << " examples\n";
  }
  TrainConfig tc = cfg.train;
  tc.epochs = cfg.retrain_epochs;
  run.p1 = Retrain(data.train, run.augmentation.examples, data.valid, cfg.mode, tc, cfg.model,
                   progress);
  if (data.rules && !data.test.examples.empty()) {
    run.after = EvaluateModel(run.p1->model, data.test, *data.rules, cfg.workers);
  }
  return run;
}

}  // namespace selfgen
