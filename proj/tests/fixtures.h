//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_TESTS_FIXTURES_H_
#define MOLTEXT_TESTS_FIXTURES_H_

#include <string>
#include <vector>

#include "moltext/model.h"
#include "moltext/vocab.h"

namespace moltext::testing {

struct TinyCorpus {
  std::vector<std::string> smiles;
  std::vector<std::string> texts;
  MotifVocab motif_vocab;
  WordVocab word_vocab;
  std::vector<MotifSequence> motifs;
  std::vector<TextSequence> text;
};

inline TinyCorpus make_tiny_corpus() {
  TinyCorpus c;
  c.smiles = {"CCc1ccccc1", "OCCc1ccncc1", "c1ccccc1OC1CCCCC1",
              "Clc1ccc(CCN)cc1", "CCCc1ccoc1", "NC1CCOCC1"};
  c.texts = {"an ethyl group on a benzene ring",
             "a pyridine ring with an ethyl alcohol",
             "benzene linked by oxygen to cyclohexane",
             "chloro benzene with an amine chain",
             "a furan ring with propyl",
             "morpholine carrying an amine group"};
  c.motif_vocab = build_motif_vocab(c.smiles).vocab;
  c.motif_vocab.set_maskable(build_masking_set(c.motif_vocab, 1, 100));
  c.word_vocab = WordVocab::build(c.texts, 1);
  for (std::size_t i = 0; i < c.smiles.size(); ++i) {
    c.motifs.push_back(tokenize_molecule(parse_smiles(c.smiles[i]), c.motif_vocab));
    c.text.push_back(tokenize_text(c.texts[i], c.word_vocab));
  }
  return c;
}

inline ModelConfig tiny_config(const TinyCorpus &c) {
  ModelConfig cfg;
  cfg.graph.layers = 2;
  cfg.graph.width = 6;
  cfg.fusion.rounds = 2;
  cfg.fusion.motif_layers = {1, 1};
  cfg.fusion.text_layers = {1, 1};
  cfg.fusion.heads = 2;
  cfg.fusion.width = 8;
  cfg.fusion.ff_width = 12;
  cfg.max_positions = 16;
  cfg.word_vocab_size = c.word_vocab.size();
  cfg.motif_classes = c.motif_vocab.maskable_count();
  return cfg;
}

}  // namespace moltext::testing

#endif  // MOLTEXT_TESTS_FIXTURES_H_
