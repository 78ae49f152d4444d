//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_OBJECTIVES_H_
#define MOLTEXT_OBJECTIVES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "moltext/fusion.h"

namespace moltext {

struct MaskRates {
  double motif = 0.2;
  double word = 0.15;
};

// Candidates: non-global motif slots with a maskable label, and non-global
// word slots that are not <UNK>. Count = round(rate * candidates), at least 1
// when rate > 0 and a candidate exists. Slots are listed in ascending order.
MaskSpec sample_masks(const MotifSequence &motifs, const TextSequence &text,
                      const MotifVocab &vocab, const MaskRates &rates,
                      std::uint64_t seed);

struct LossConfig {
  double temperature = 0.07;
  double alpha = 0.5;  // word term weight
  double beta = 1.0;   // motif term weight
  // Divide each masked term by its slot count instead of summing.
  bool normalize_masked = false;
};

void to_json(nlohmann::json &j, const LossConfig &c);
void from_json(const nlohmann::json &j, LossConfig &c);

// Symmetric InfoNCE over cosine similarities / temperature; row i of each
// input is a positive pair. Mean over the batch. Requires >= 2 rows.
Var contrastive_loss(Var motif_globals, Var text_globals, double temperature);

// beta * sum CE(motif rows) + alpha * sum CE(word rows). Either logits handle
// may be invalid when its label list is empty.
Var masked_prediction_loss(Tape &tape, Var motif_logits,
                           std::span<const int> motif_classes, Var word_logits,
                           std::span<const int> word_labels, const LossConfig &config);

struct MaskedPrediction {
  Var loss;
  Var motif_logits;  // invalid when no motif slot is masked
  Var word_logits;
  std::vector<int> motif_targets;  // classifier classes
  std::vector<int> motif_predicted;
  std::vector<int> word_targets;
  std::vector<int> word_predicted;
};

// Applies the classifiers to h at the masked slots of `out.mask`.
MaskedPrediction masked_prediction_loss(Tape &tape, const Model &model,
                                        const FusionOutput &out,
                                        const MotifVocab &vocab,
                                        const LossConfig &config);

// Motif logits for the given slots of h_motif (slots x motif classes).
Var motif_logits(Tape &tape, const Model &model, Var h_motif,
                 std::span<const int> slots);

struct PairInput {
  const MotifSequence *motifs = nullptr;
  const TextSequence *text = nullptr;
  MaskSpec mask;
};

struct LossReport {
  double total = 0;
  double contrastive = 0;
  double masked = 0;
  int motif_correct = 0;
  int motif_masked = 0;
  int word_correct = 0;
  int word_masked = 0;
  std::vector<int> motif_targets;
};

struct TotalLoss {
  Var loss;
  LossReport report;
};

// L = L_con + mean over examples of L_pre.
TotalLoss total_loss(Tape &tape, const Model &model,
                     std::span<const PairInput> batch, const MotifVocab &vocab,
                     const LossConfig &config);

}  // namespace moltext

#endif  // MOLTEXT_OBJECTIVES_H_
