#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "selfgen/corpus/dataset.h"
#include "selfgen/errors.h"
#include "selfgen/seq2seq/train.h"
#include "test_util.h"

namespace selfgen {
namespace {

using testing::DataPath;
using testing::ToySchema;

Dataset FirstN(const Dataset& ds, std::size_t n) {
  Dataset out = ds;
  out.examples.resize(std::min(n, ds.examples.size()));
  return out;
}

struct Toy {
  Dataset train = FirstN(LoadE2eCorpus(DataPath("toy/train.csv"), ToySchema()), 50);
  Dataset valid = LoadE2eCorpus(DataPath("toy/valid.csv"), ToySchema(), Split::kValid);
};

ModelConfig Dim32() {
  ModelConfig mc;
  mc.embed_dim = mc.hidden_dim = 32;
  mc.max_decode_length = 25;
  return mc;
}

TEST(TrainTest, LossHalvesOnFiftyExamplesInTwentyEpochs) {
  const Toy toy;
  TrainConfig tc;
  tc.epochs = 20;
  tc.batch_size = 4;
  tc.lr = 1.0;
  std::ostringstream log;
  const TrainResult r = Train(toy.train, toy.valid, InputMode::kE2eDelex, tc, Dim32(), std::nullopt, &log);
  ASSERT_EQ(r.log.size(), 21u);
  EXPECT_LT(r.log.back().train_loss, 0.5 * r.log.front().train_loss);
  // One JSON line per epoch, epoch 0 included.
  const std::string text = log.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(TrainTest, SelectionPicksTheEarliestBestEpoch) {
  const Toy toy;
  TrainConfig tc;
  tc.epochs = 6;
  tc.batch_size = 8;
  tc.lr = 1.0;
  const TrainResult r = Train(toy.train, toy.valid, InputMode::kE2eDelex, tc, Dim32());
  double best = -1.0;
  std::size_t epoch = 0;
  for (const EpochRecord& e : r.log) {
    if (e.valid_bleu > best) {
      best = e.valid_bleu;
      epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, epoch);
  EXPECT_DOUBLE_EQ(r.best_bleu, best);
  EXPECT_DOUBLE_EQ(ValidationBleu(r.model, MakeValidationItems(toy.valid, InputMode::kE2eDelex)),
                   best);
}

TEST(TrainTest, SeededRunsAreBitReproducible) {
  const Toy toy;
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 8;
  const TrainResult a = Train(toy.train, toy.valid, InputMode::kE2eDelex, tc, Dim32());
  const TrainResult b = Train(toy.train, toy.valid, InputMode::kE2eDelex, tc, Dim32());
  EXPECT_TRUE(a.model.params().BitIdentical(b.model.params()));
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);
  }
  tc.seed = 2;
  const TrainResult c = Train(toy.train, toy.valid, InputMode::kE2eDelex, tc, Dim32());
  EXPECT_FALSE(a.model.params().BitIdentical(c.model.params()));
}

TEST(TrainTest, EmptySplitsAndBadConfigAreRejected) {
  const Toy toy;
  Dataset empty{ToySchema(), {}, Split::kValid};
  EXPECT_THROW(Train(toy.train, empty, InputMode::kE2eDelex, TrainConfig{}, Dim32()),
               ContractError);
  EXPECT_THROW(Train(empty, toy.valid, InputMode::kE2eDelex, TrainConfig{}, Dim32()),
               ContractError);
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(Train(toy.train, toy.valid, InputMode::kE2eDelex, bad, Dim32()), ConfigError);
}

}  // namespace
}  // namespace selfgen
