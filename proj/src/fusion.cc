//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/fusion.h"

#include <optional>

namespace moltext {

std::vector<int> MaskSpec::motif_slots() const {
  std::vector<int> out;
  for (const MaskedSlot &m : motif)
    out.push_back(m.slot);
  return out;
}

std::vector<int> MaskSpec::word_slots() const {
  std::vector<int> out;
  for (const MaskedSlot &m : word)
    out.push_back(m.slot);
  return out;
}

Var attend(Tape &tape, const Model &model, const AttentionIds &ids, int heads,
           Var queries, Var context) {
  Var q = linear(tape, model, ids.query, queries);
  Var k = linear(tape, model, ids.key, context);
  Var v = linear(tape, model, ids.value, context);
  return linear(tape, model, ids.output, ops::attention(q, k, v, heads));
}

Var self_attention_block(Tape &tape, const Model &model, const BlockIds &ids,
                         Var x) {
  const int heads = model.config().fusion.heads;
  Var n1 = layer_norm(tape, model, ids.attn_norm, x);
  x = ops::add(x, attend(tape, model, ids.attn, heads, n1, n1));
  Var n2 = layer_norm(tape, model, ids.ff_norm, x);
  Var ff = linear(tape, model, ids.ff_out,
                  ops::gelu(linear(tape, model, ids.ff_in, n2)));
  return ops::add(x, ff);
}

Var self_attention_stack(Tape &tape, const Model &model,
                         std::span<const BlockIds> blocks, Var x) {
  for (const BlockIds &b : blocks)
    x = self_attention_block(tape, model, b, x);
  return x;
}

Var cross_attend(Tape &tape, const Model &model, const CrossIds &ids,
                 Var queries, Var context) {
  Var q = layer_norm(tape, model, ids.query_norm, queries);
  Var c = layer_norm(tape, model, ids.context_norm, context);
  return ops::add(queries, attend(tape, model, ids.attn,
                                  model.config().fusion.heads, q, c));
}

FusionOutput encode_pair(Tape &tape, const Model &model,
                         const MotifSequence &motifs, const TextSequence &text,
                         const MaskSpec &mask, MotifEmbeddingCache *cache) {
  std::optional<MotifEmbeddingCache> local;
  if (cache == nullptr)
    cache = &local.emplace(tape);
  const std::vector<int> motif_slots = mask.motif_slots();
  const std::vector<int> word_slots = mask.word_slots();
  Var m = embed_motif_sequence(tape, model, motifs, motif_slots, *cache);
  Var t = embed_text_sequence(tape, model, text, word_slots);

  const FusionConfig &fc = model.config().fusion;
  FusionOutput out;
  out.mask = mask;
  for (const RoundIds &round : model.layout().rounds) {
    Var zm = self_attention_stack(tape, model, round.motif_blocks, m);
    Var zt = self_attention_stack(tape, model, round.text_blocks, t);
    out.z_motif_rounds.push_back(zm);
    out.z_text_rounds.push_back(zt);
    if (fc.cross_attention) {
      m = cross_attend(tape, model, round.motif_cross, zm, zt);
      t = cross_attend(tape, model, round.text_cross, zt, zm);
    } else {
      m = zm;
      t = zt;
    }
  }
  out.z_motif = out.z_motif_rounds.back();
  out.z_text = out.z_text_rounds.back();
  out.h_motif = m;
  out.h_text = t;
  const std::size_t r =
      fc.contrastive_round == ContrastiveRound::kFirst ? 0
                                                       : out.z_motif_rounds.size() - 1;
  out.motif_global = ops::slice_rows(out.z_motif_rounds[r], 0, 1);
  out.text_global = ops::slice_rows(out.z_text_rounds[r], 0, 1);
  return out;
}

}  // namespace moltext
