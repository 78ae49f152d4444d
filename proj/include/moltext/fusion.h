//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_FUSION_H_
#define MOLTEXT_FUSION_H_

#include <span>
#include <vector>

#include "moltext/encoders.h"
#include "moltext/model.h"
#include "moltext/vocab.h"

namespace moltext {

struct MaskedSlot {
  int slot = 0;
  // Motif vocabulary id or word id of the hidden token.
  int label = 0;

  friend bool operator==(const MaskedSlot &, const MaskedSlot &) = default;
};

struct MaskSpec {
  std::vector<MaskedSlot> motif;
  std::vector<MaskedSlot> word;

  bool empty() const { return motif.empty() && word.empty(); }
  std::vector<int> motif_slots() const;
  std::vector<int> word_slots() const;

  friend bool operator==(const MaskSpec &, const MaskSpec &) = default;
};

struct FusionOutput {
  // Final round self-attention outputs and final cross-attention outputs.
  Var z_motif, z_text;
  Var h_motif, h_text;
  // Self-attention output of every round.
  std::vector<Var> z_motif_rounds, z_text_rounds;
  // 1 x d global rows of the round selected by the config; used by the
  // contrastive loss and the pairless embeddings.
  Var motif_global, text_global;
  MaskSpec mask;
};

// Multi-head attention with learned query/key/value/output projections.
Var attend(Tape &tape, const Model &model, const AttentionIds &ids,
           int heads, Var queries, Var context);

// Pre-norm encoder block: x + Attn(LN x), then x + FF(LN x). No causal mask.
Var self_attention_block(Tape &tape, const Model &model, const BlockIds &ids,
                         Var x);
Var self_attention_stack(Tape &tape, const Model &model,
                         std::span<const BlockIds> blocks, Var x);

// queries + Wo Attn(LN_q queries, LN_c context)
Var cross_attend(Tape &tape, const Model &model, const CrossIds &ids,
                 Var queries, Var context);

FusionOutput encode_pair(Tape &tape, const Model &model,
                         const MotifSequence &motifs, const TextSequence &text,
                         const MaskSpec &mask,
                         MotifEmbeddingCache *cache = nullptr);

}  // namespace moltext

#endif  // MOLTEXT_FUSION_H_
