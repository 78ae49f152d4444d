//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_ENCODERS_H_
#define MOLTEXT_ENCODERS_H_

#include <span>
#include <string>
#include <unordered_map>

#include "moltext/model.h"
#include "moltext/vocab.h"

namespace moltext {

// Per-atom embeddings (atoms x graph width) from GIN message passing:
// H <- MLP((I + A) H) per layer, GELU between layers.
Var gin_encode(Tape &tape, const Model &model, const MolecularGraph &graph);

// Mean over atom rows.
Var readout(Var atom_embeddings);

// Projected motif embeddings keyed by canonical key, valid for one tape.
// Motifs are encoded from the graph of their canonical SMILES, so equal keys
// give bit-identical rows regardless of where the motif was found.
class MotifEmbeddingCache {
public:
  explicit MotifEmbeddingCache(Tape &tape) : tape_(&tape) {}
  Var get(const Model &model, const std::string &canonical_key);

private:
  Tape *tape_;
  std::unordered_map<std::string, Var> rows_;
};

// (J+1) x d: <MOL>, then one projected motif readout per slot, each plus its
// position embedding. Masked slots take the motif <MASK> row.
Var embed_motif_sequence(Tape &tape, const Model &model,
                         const MotifSequence &seq,
                         std::span<const int> masked_slots,
                         MotifEmbeddingCache &cache);
Var embed_motif_sequence(Tape &tape, const Model &model,
                         const MotifSequence &seq,
                         std::span<const int> masked_slots = {});

// (D+1) x d: word table rows plus position embeddings. Masked slots take the
// word <MASK> row.
Var embed_text_sequence(Tape &tape, const Model &model,
                        const TextSequence &seq,
                        std::span<const int> masked_slots = {});

}  // namespace moltext

#endif  // MOLTEXT_ENCODERS_H_
