//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/encoders.h"

#include <stdexcept>
#include <vector>

namespace moltext {

Var gin_encode(Tape &tape, const Model &model, const MolecularGraph &graph) {
  const ModelLayout &layout = model.layout();
  const int n = graph.atom_count();
  if (n == 0)
    throw std::invalid_argument("gin_encode: empty graph");
  Matrix features = graph.features();
  if (features.cols() != model.config().graph.input_width)
    throw std::invalid_argument("gin_encode: feature width mismatch");

  Matrix propagate(n, n);
  for (int i = 0; i < n; ++i) {
    propagate(i, i) = 1.0;
    for (const Neighbor &nb : graph.neighbors(i))
      propagate(i, nb.atom) = 1.0;
  }
  Var adj = tape.constant(std::move(propagate));
  Var h = tape.constant(std::move(features));
  for (std::size_t l = 0; l < layout.gin.size(); ++l) {
    h = ops::matmul(adj, h);
    h = linear(tape, model, layout.gin[l].second,
               ops::gelu(linear(tape, model, layout.gin[l].first, h)));
    if (l + 1 < layout.gin.size())
      h = ops::gelu(h);
  }
  return h;
}

Var readout(Var atom_embeddings) {
  if (atom_embeddings.rows() == 0)
    throw std::invalid_argument("readout: empty motif");
  return ops::mean_rows(atom_embeddings);
}

Var MotifEmbeddingCache::get(const Model &model,
                             const std::string &canonical_key) {
  auto it = rows_.find(canonical_key);
  if (it != rows_.end())
    return it->second;
  const MolecularGraph graph = parse_smiles(canonical_key);
  Var row = linear(*tape_, model, model.layout().motif_projection,
                   readout(gin_encode(*tape_, model, graph)));
  rows_.emplace(canonical_key, row);
  return row;
}

namespace {

void check_positions(std::span<const int> positions, const Model &model) {
  for (int p : positions)
    if (p < 0 || p >= model.config().max_positions)
      throw std::out_of_range("position " + std::to_string(p) +
                              " exceeds the position table");
}

std::vector<bool> mask_flags(std::span<const int> masked_slots, int length) {
  std::vector<bool> flags(length, false);
  for (int s : masked_slots) {
    if (s <= 0 || s >= length)
      throw std::out_of_range("masked slot " + std::to_string(s) +
                              " is not a maskable slot");
    flags[s] = true;
  }
  return flags;
}

}  // namespace

Var embed_motif_sequence(Tape &tape, const Model &model,
                         const MotifSequence &seq,
                         std::span<const int> masked_slots,
                         MotifEmbeddingCache &cache) {
  const int len = seq.length();
  if (len < 1 || static_cast<int>(seq.motifs.size()) != len - 1 ||
      static_cast<int>(seq.positions.size()) != len)
    throw std::invalid_argument("embed_motif_sequence: malformed sequence");
  check_positions(seq.positions, model);
  const std::vector<bool> masked = mask_flags(masked_slots, len);

  Var special = model.var(tape, model.layout().motif_special);
  std::vector<Var> rows;
  rows.reserve(len);
  for (int s = 0; s < len; ++s) {
    if (s == 0) {
      const int r = kMolSpecialRow;
      rows.push_back(ops::gather_rows(special, std::span<const int>(&r, 1)));
    } else if (masked[s]) {
      const int r = kMotifMaskSpecialRow;
      rows.push_back(ops::gather_rows(special, std::span<const int>(&r, 1)));
    } else {
      rows.push_back(cache.get(model, seq.motifs[s - 1].canonical_key));
    }
  }
  Var positions = ops::gather_rows(
      model.var(tape, model.layout().motif_positions), seq.positions);
  return ops::add(ops::concat_rows(rows), positions);
}

Var embed_motif_sequence(Tape &tape, const Model &model,
                         const MotifSequence &seq,
                         std::span<const int> masked_slots) {
  MotifEmbeddingCache cache(tape);
  return embed_motif_sequence(tape, model, seq, masked_slots, cache);
}

Var embed_text_sequence(Tape &tape, const Model &model,
                        const TextSequence &seq,
                        std::span<const int> masked_slots) {
  const int len = seq.length();
  if (len < 1 || static_cast<int>(seq.positions.size()) != len)
    throw std::invalid_argument("embed_text_sequence: malformed sequence");
  check_positions(seq.positions, model);
  const std::vector<bool> masked = mask_flags(masked_slots, len);
  std::vector<int> ids(seq.ids);
  for (int s = 0; s < len; ++s) {
    if (ids[s] < 0 || ids[s] >= model.config().word_vocab_size)
      throw std::out_of_range("word id " + std::to_string(ids[s]) +
                              " outside the word table");
    if (masked[s])
      ids[s] = WordVocab::kMask;
  }
  Var words = ops::gather_rows(model.var(tape, model.layout().word_table), ids);
  Var positions = ops::gather_rows(
      model.var(tape, model.layout().text_positions), seq.positions);
  return ops::add(words, positions);
}

}  // namespace moltext
