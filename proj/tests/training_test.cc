//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/training.h"

#include <cmath>

#include <gtest/gtest.h>

#include "moltext/checkpoint.h"
#include "moltext/digest.h"
#include "moltext/fusion.h"

namespace moltext {
namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.batch_size = 4;
  cfg.epochs = 3;
  cfg.model.graph.layers = 2;
  cfg.model.graph.width = 8;
  cfg.model.fusion.width = 16;
  cfg.model.fusion.heads = 2;
  cfg.model.fusion.ff_width = 24;
  cfg.model.fusion.text_layers = {1, 1};
  cfg.model.max_positions = 32;
  cfg.mask_min_count = 1;
  cfg.min_word_frequency = 1;
  return cfg;
}

class TrainingTest : public ::testing::Test {
protected:
  void SetUp() override {
    pairs = pairs_of(generate_synthetic_corpus(18, MotifLibrary::standard(), 2));
    vocab = build_vocabularies(pairs, cfg);
    data = encode_examples(pairs, vocab.motifs, vocab.words,
                           cfg.model.max_positions);
  }

  TrainConfig cfg = small_config();
  std::vector<PairExample> pairs;
  Vocabularies vocab;
  std::vector<EncodedExample> data;
};

std::string metrics_text(const std::vector<EpochMetrics> &m) {
  std::string s;
  for (const auto &e : m)
    s += nlohmann::json(e).dump() + "\n";
  return s;
}

TEST(AdamTest, MinimizesQuadraticAndRespectsGroupRates) {
  std::vector<Parameter> params = {
      {"a", ParamGroup::kFusion, Matrix::from_rows({{3.0, -2.0}})},
      {"b", ParamGroup::kClassifier, Matrix::from_rows({{1.0}})}};
  AdamConfig cfg;
  cfg.learning_rates = {0.1, 0.1, 0.1, 0.1, 0.0};
  Adam adam(params, cfg);
  for (int i = 0; i < 500; ++i) {
    Tape tape;
    Var loss = ops::add(ops::squared_norm(tape.param(params[0])),
                        ops::squared_norm(tape.param(params[1])));
    tape.backward(loss);
    adam.step(params, tape);
  }
  EXPECT_LT(std::abs(params[0].value(0, 0)), 1e-2);
  EXPECT_LT(std::abs(params[0].value(0, 1)), 1e-2);
  EXPECT_EQ(params[1].value(0, 0), 1.0);
  EXPECT_EQ(adam.steps(), 500);
}

TEST_F(TrainingTest, LossDecreasesOnTinyCorpus) {
  cfg.epochs = 12;
  auto r = train(data, vocab.motifs, vocab.words, cfg);
  ASSERT_EQ(r.metrics.size(), 12u);
  EXPECT_LT(r.metrics.back().loss, r.metrics.front().loss);
  EXPECT_EQ(r.metrics.front().batches, 5);  // 18 = 4 * 4 + 2
  EXPECT_EQ(r.steps, 60);
}

TEST_F(TrainingTest, IdenticalSeedsGiveIdenticalStreams) {
  auto a = train(data, vocab.motifs, vocab.words, cfg);
  auto b = train(data, vocab.motifs, vocab.words, cfg);
  EXPECT_EQ(metrics_text(a.metrics), metrics_text(b.metrics));
  for (std::size_t i = 0; i < a.model.parameters().size(); ++i)
    EXPECT_EQ(a.model.param(i).value, b.model.param(i).value);
  TrainConfig other = cfg;
  other.seed = 6;
  auto c = train(data, vocab.motifs, vocab.words, other);
  EXPECT_NE(metrics_text(a.metrics), metrics_text(c.metrics));
}

TEST_F(TrainingTest, ZeroLearningRatesFreezeModel) {
  cfg.learning_rates.fill(0.0);
  Model init(resolved_model_config(cfg, vocab.motifs, vocab.words),
             model_seed(cfg.seed));
  auto r = train(data, vocab.motifs, vocab.words, cfg);
  for (std::size_t i = 0; i < init.parameters().size(); ++i)
    EXPECT_EQ(init.param(i).value, r.model.param(i).value);

  cfg.resample_masks = false;
  cfg.shuffle = false;
  auto fixed = train(data, vocab.motifs, vocab.words, cfg);
  for (const EpochMetrics &m : fixed.metrics) {
    EXPECT_EQ(m.loss, fixed.metrics[0].loss);
    EXPECT_EQ(m.motif_accuracy, fixed.metrics[0].motif_accuracy);
  }
}

TEST_F(TrainingTest, NoMaskingMeansNoMaskedLoss) {
  cfg.mask_rates = {0.0, 0.0};
  auto r = train(data, vocab.motifs, vocab.words, cfg);
  for (const EpochMetrics &m : r.metrics) {
    EXPECT_EQ(m.masked, 0.0);
    EXPECT_EQ(m.masked_motifs, 0);
    EXPECT_EQ(m.loss, m.contrastive);
  }
}

TEST_F(TrainingTest, NonFiniteLossReportsBatch) {
  Model m(resolved_model_config(cfg, vocab.motifs, vocab.words), 1);
  m.param(m.find("embed.words")).value.fill(NAN);
  try {
    train(std::move(m), data, vocab.motifs, cfg);
    FAIL() << "expected divergence";
  } catch (const TrainingDivergence &e) {
    EXPECT_EQ(e.epoch(), 1);
    EXPECT_EQ(e.batch(), 0);
  }
}

TEST_F(TrainingTest, RejectsBadConfigs) {
  cfg.batch_size = 1;
  EXPECT_THROW(train(data, vocab.motifs, vocab.words, cfg),
               std::invalid_argument);
  cfg = small_config();
  cfg.batch_size = 40;
  EXPECT_THROW(train(data, vocab.motifs, vocab.words, cfg),
               std::invalid_argument);
}

TEST_F(TrainingTest, ConfigJsonRoundTripAndOverrides) {
  nlohmann::json j = cfg;
  TrainConfig back;
  from_json(j, back);
  EXPECT_EQ(nlohmann::json(back), j);

  TrainConfig partial;
  from_json(nlohmann::json::parse(
                R"({"epochs": 2, "learning_rates": {"fusion": 3e-5},
                    "model": {"fusion": {"contrastive_round": "final"}}})"),
            partial);
  EXPECT_EQ(partial.epochs, 2);
  EXPECT_EQ(partial.learning_rates[static_cast<int>(ParamGroup::kFusion)], 3e-5);
  EXPECT_EQ(partial.learning_rates[0], 1e-3);
  EXPECT_EQ(partial.model.fusion.contrastive_round, ContrastiveRound::kFinal);
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"epoch": 2})"), partial),
               std::invalid_argument);
}

TEST_F(TrainingTest, CheckpointRoundTripIsExact) {
  auto r = train(data, vocab.motifs, vocab.words, cfg);
  const std::string bytes = serialize_checkpoint(
      r.model, cfg, vocab.motifs, vocab.words, {cfg.seed, cfg.epochs, r.steps});
  Checkpoint cp = parse_checkpoint(bytes, vocab.motifs, vocab.words);
  EXPECT_EQ(cp.rng.steps, r.steps);
  EXPECT_EQ(nlohmann::json(cp.train_config), nlohmann::json(cfg));
  for (std::size_t i = 0; i < data.size(); ++i) {
    Tape t1(false), t2(false);
    auto a = encode_pair(t1, r.model, data[i].motifs, data[i].text, {});
    auto b = encode_pair(t2, cp.model, data[i].motifs, data[i].text, {});
    EXPECT_EQ(a.h_motif.value(), b.h_motif.value());
    EXPECT_EQ(a.h_text.value(), b.h_text.value());
  }
  EXPECT_EQ(serialize_checkpoint(cp.model, cfg, vocab.motifs, vocab.words,
                                 cp.rng),
            bytes);
}

TEST_F(TrainingTest, CheckpointVerification) {
  Model m(resolved_model_config(cfg, vocab.motifs, vocab.words), 1);
  const std::string bytes =
      serialize_checkpoint(m, cfg, vocab.motifs, vocab.words, {});

  MotifVocab other = MotifVocab::from_counts({{"C", 1}});
  EXPECT_THROW(parse_checkpoint(bytes, other, vocab.words), CheckpointError);

  auto tamper = [&](const std::string &from, const std::string &to) {
    std::string copy = bytes;
    const std::size_t at = copy.find(from);
    EXPECT_NE(at, std::string::npos);
    copy.replace(at, from.size(), to);
    return copy;
  };
  const std::string digest = sha256_hex(vocab.motifs.serialize());
  std::string flipped = digest;
  flipped[0] = flipped[0] == '0' ? '1' : '0';
  try {
    parse_checkpoint(tamper(digest, flipped), vocab.motifs, vocab.words);
    FAIL();
  } catch (const CheckpointError &e) {
    EXPECT_NE(std::string(e.what()).find("digest"), std::string::npos);
  }
  try {
    parse_checkpoint(tamper("\"format_version\":\"1\"", "\"format_version\":\"2\""),
                     vocab.motifs, vocab.words);
    FAIL();
  } catch (const CheckpointError &e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  try {
    // Same length, so the header size stays valid.
    parse_checkpoint(tamper("\"name\":\"head.word.bias\"", "\"name\":\"head.word.bia_\""),
                     vocab.motifs, vocab.words);
    FAIL();
  } catch (const CheckpointError &e) {
    EXPECT_NE(std::string(e.what()).find("missing tensor \"head.word.bias\""),
              std::string::npos);
  }
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 8), vocab.motifs,
                                vocab.words),
               CheckpointError);
  EXPECT_THROW(parse_checkpoint("garbage", vocab.motifs, vocab.words),
               CheckpointError);
}

}  // namespace
}  // namespace moltext
