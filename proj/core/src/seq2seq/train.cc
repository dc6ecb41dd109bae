#include "selfgen/seq2seq/train.h"

#include <cmath>
#include <iostream>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "selfgen/eval/bleu.h"
#include "selfgen/neural/graph.h"

namespace selfgen {
namespace {

struct EncodedPair {
  std::vector<std::size_t> input;
  std::vector<std::size_t> target;
};

double EvalLoss(const Seq2SeqModel& model, const std::vector<EncodedPair>& pairs) {
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const EncodedPair& p : pairs) {
    nll += model.SequenceNll(p.input, p.target);
    tokens += p.target.size() + 1;
  }
  return tokens == 0 ? 0.0 : nll / tokens;
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be > 0");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (max_grad_norm < 0.0) throw ConfigError("max_grad_norm must be >= 0");
}

std::vector<TrainingPair> MakeTrainingPairs(const Dataset& ds, InputMode mode,
                                            std::size_t* dropped) {
  const std::set<std::string> delex = DelexAttributes(ds.schema, mode);
  std::vector<TrainingPair> pairs;
  std::size_t misses = 0;
  for (const Example& ex : ds.examples) {
    const LinearizedInput input = Linearize(ex.mr, ds.schema, mode);
    for (const Utterance& u : ex.refs) {
      try {
        Utterance target = Delexicalize(u, ex.mr, ds.schema, delex).first;
        if (target.tokens.empty()) continue;
        pairs.push_back({input, std::move(target.tokens)});
      } catch (const DelexMissError& e) {
        ++misses;
      }
    }
  }
  if (misses > 0) {
    std::cerr << "warning: dropped " << misses
              << " reference(s) whose slot values could not be delexicalized\n";
  }
  if (dropped != nullptr) *dropped = misses;
  return pairs;
}

std::vector<ValidationItem> MakeValidationItems(const Dataset& ds, InputMode mode) {
  const std::set<std::string> delex = DelexAttributes(ds.schema, mode);
  std::vector<ValidationItem> items;
  for (const Example& ex : GroupByMr(ds.examples)) {
    ValidationItem item;
    item.mr = ex.mr;
    item.input = Linearize(ex.mr, ds.schema, mode);
    item.mapping = PlaceholderBindings(ex.mr, ds.schema, delex);
    for (const Utterance& u : ex.refs) item.refs.push_back(u.tokens);
    if (!item.refs.empty()) items.push_back(std::move(item));
  }
  return items;
}

double ValidationBleu(const Seq2SeqModel& model, const std::vector<ValidationItem>& items,
                      std::size_t workers) {
  if (items.empty()) throw ContractError("validation set is empty");
  std::vector<TokenSeq> hyps(items.size());
  std::vector<std::vector<TokenSeq>> refs(items.size());
  auto run = [&](std::size_t start, std::size_t stride) {
    for (std::size_t i = start; i < items.size(); i += stride) {
      const DecodedSample s = Greedy(model, items[i].input);
      hyps[i] = Relexicalize(Utterance::FromTokens(s.tokens), items[i].mapping).tokens;
      refs[i] = items[i].refs;
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (std::thread& t : pool) t.join();
  }
  return CorpusBleu(hyps, refs);
}

std::string EpochRecordJson(const EpochRecord& r) {
  nlohmann::json j;
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["valid_bleu"] = r.valid_bleu;
  return j.dump();
}

TrainResult Train(const Dataset& train, const Dataset& valid, InputMode mode,
                  const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const std::optional<VocabPair>& vocab, std::ostream* log) {
  cfg.Validate();
  if (train.examples.empty()) throw ContractError("training split is empty");
  if (valid.examples.empty()) throw ContractError("validation split is empty");

  const VocabPair vocabs = vocab ? *vocab : BuildVocab(train, mode);
  Seq2SeqModel model(model_cfg, vocabs.input, vocabs.output, mode);
  model.Initialize(cfg.seed);

  std::size_t dropped = 0;
  std::vector<EncodedPair> pairs;
  for (const TrainingPair& p : MakeTrainingPairs(train, mode, &dropped)) {
    pairs.push_back({model.EncodeInputTokens(p.input), model.EncodeTarget(p.target)});
  }
  if (pairs.empty()) throw ContractError("no usable training pairs");
  const std::vector<ValidationItem> items = MakeValidationItems(valid, mode);

  TrainResult result{model, {}, 0, 0.0, dropped};
  auto record = [&](const EpochRecord& r) {
    result.log.push_back(r);
    if (log != nullptr) *log << EpochRecordJson(r) << '\n' << std::flush;
    if (result.log.size() == 1 || r.valid_bleu > result.best_bleu) {
      result.best_bleu = r.valid_bleu;
      result.best_epoch = r.epoch;
      result.model = model;
    }
  };
  record({0, EvalLoss(model, pairs), ValidationBleu(model, items, cfg.workers)});

  RngStream shuffle_rng(cfg.seed, 1);
  RngStream dropout_rng(cfg.seed, 2);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  ParamStore& params = model.params();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.Below(i)]);
    }
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t b = start; b < end; ++b) batch_tokens += pairs[order[b]].target.size() + 1;
      params.ZeroGrads();
      for (std::size_t b = start; b < end; ++b) {
        const EncodedPair& p = pairs[order[b]];
        Graph g;
        Var loss;
        try {
          loss = model.SequenceLoss(g, p.input, p.target, true, dropout_rng);
        } catch (const NumericalError& e) {
          throw NumericalError("training diverged in epoch " + std::to_string(epoch) +
                               ": " + e.what());
        }
        const double value = g.scalar(loss);
        if (!std::isfinite(value)) {
          throw NumericalError("training diverged in epoch " + std::to_string(epoch) +
                               ": non-finite loss");
        }
        epoch_nll += value;
        g.Backward(g.Scale(loss, 1.0 / batch_tokens));
      }
      epoch_tokens += batch_tokens;
      if (cfg.max_grad_norm > 0.0) params.ClipGradNorm(cfg.max_grad_norm);
      SgdStep(params, cfg.lr, cfg.weight_decay);
    }
    record({epoch, epoch_nll / epoch_tokens, ValidationBleu(model, items, cfg.workers)});
  }
  return result;
}

}  // namespace selfgen
