//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_TRAINING_H_
#define MOLTEXT_TRAINING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "moltext/corpus.h"
#include "moltext/model.h"
#include "moltext/objectives.h"
#include "moltext/optimizer.h"
#include "moltext/vocab.h"

namespace moltext {

struct TrainConfig {
  std::uint64_t seed = 0;
  int batch_size = 8;
  int epochs = 30;
  GroupRates learning_rates = {1e-3, 1e-3, 1e-3, 1e-3, 1e-3};
  MaskRates mask_rates;
  LossConfig loss;
  // Vocabulary sizes are filled in from the data.
  ModelConfig model;
  // Masking-set thresholds applied when vocabularies are built.
  std::int64_t mask_min_count = 8;
  std::int64_t mask_max_count = 80005;
  int min_word_frequency = 2;
  // Draw fresh masks every epoch; otherwise masks depend only on the example.
  bool resample_masks = true;
  bool shuffle = true;

  void validate() const;
};

void to_json(nlohmann::json &j, const TrainConfig &c);
void from_json(const nlohmann::json &j, TrainConfig &c);

struct Vocabularies {
  MotifVocab motifs;
  WordVocab words;
  VocabBuildReport report;
};

// Motif vocabulary with the masking set applied, plus the word vocabulary.
Vocabularies build_vocabularies(std::span<const PairExample> pairs,
                                const TrainConfig &config);

struct EncodedExample {
  std::string id;
  MotifSequence motifs;
  TextSequence text;
};

// Throws std::invalid_argument naming the first record whose SMILES does not
// parse or whose sequences exceed `max_positions`.
std::vector<EncodedExample> encode_examples(std::span<const PairExample> pairs,
                                            const MotifVocab &motif_vocab,
                                            const WordVocab &word_vocab,
                                            int max_positions);

struct EpochMetrics {
  int epoch = 0;
  int batches = 0;
  double loss = 0;
  double contrastive = 0;
  double masked = 0;
  double motif_accuracy = 0;
  double word_accuracy = 0;
  // Accuracy of always predicting the epoch's most frequent masked motif.
  double motif_majority_baseline = 0;
  int masked_motifs = 0;
  int masked_words = 0;
};

void to_json(nlohmann::json &j, const EpochMetrics &m);

class TrainingDivergence : public std::runtime_error {
public:
  TrainingDivergence(int epoch, int batch);
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

private:
  int epoch_, batch_;
};

// Model config with vocabulary sizes taken from the vocabularies.
ModelConfig resolved_model_config(const TrainConfig &config,
                                  const MotifVocab &motif_vocab,
                                  const WordVocab &word_vocab);

struct TrainResult {
  Model model;
  std::vector<EpochMetrics> metrics;
  int steps = 0;
};

using EpochCallback = std::function<void(const EpochMetrics &)>;

// Trains from a fresh model seeded by `config.seed`. Batches of fewer than
// two examples are dropped.
TrainResult train(std::span<const EncodedExample> data,
                  const MotifVocab &motif_vocab, const WordVocab &word_vocab,
                  const TrainConfig &config,
                  const EpochCallback &on_epoch = nullptr);

// Continues training from `model`.
TrainResult train(Model model, std::span<const EncodedExample> data,
                  const MotifVocab &motif_vocab, const TrainConfig &config,
                  const EpochCallback &on_epoch = nullptr);

std::uint64_t model_seed(std::uint64_t seed);
std::uint64_t mask_seed(std::uint64_t seed, int epoch, int example,
                        bool resample);

}  // namespace moltext

#endif  // MOLTEXT_TRAINING_H_
