//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/corpus.h"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "moltext/vocab.h"

namespace moltext {
namespace {

TEST(MotifLibraryTest, TwoMotifExample) {
  MotifLibrary lib({{"aromatic ring", "c1ccccc1", MotifRole::kRing, {0, 2, 4}},
                    {"ethyl", "CC", MotifRole::kSubstituent, {1}}});
  const int both[] = {1, 0};
  EXPECT_EQ(write_smiles(lib.assemble(both)), "CCc1ccccc1");
  auto corpus = generate_synthetic_corpus(20, lib, 1, {2, 2, 0.75, 0});
  for (const auto &ex : corpus) {
    EXPECT_EQ(ex.motifs, (std::vector<int>{0, 1}));
    EXPECT_TRUE(ex.pair.text.find("ethyl") != std::string::npos ||
                ex.pair.text.find("aromatic ring") != std::string::npos);
    MolecularGraph g = parse_smiles(ex.pair.smiles);
    EXPECT_EQ(canonical_key(g), canonical_key(parse_smiles("CCc1ccccc1")));
  }
}

TEST(MotifLibraryTest, RejectsInvalidEntries) {
  EXPECT_THROW(MotifLibrary({{"x", "C1CC", MotifRole::kRing, {0, 1, 2}}}),
               std::invalid_argument);
  EXPECT_THROW(MotifLibrary({{"x", "CC", MotifRole::kSubstituent, {0}}}),
               std::invalid_argument);
  EXPECT_THROW(MotifLibrary({{"r", "C1CCC1", MotifRole::kRing, {0, 1, 9}}}),
               std::invalid_argument);
  EXPECT_THROW(MotifLibrary({{"r", "C1CCC1", MotifRole::kRing, {0, 1, 2}},
                             {"r", "O", MotifRole::kSubstituent, {0}}}),
               std::invalid_argument);
}

TEST(SyntheticCorpusTest, DeterministicAndEmpty) {
  const MotifLibrary lib = MotifLibrary::standard();
  EXPECT_TRUE(generate_synthetic_corpus(0, lib, 3).empty());
  auto a = generate_synthetic_corpus(50, lib, 3);
  auto b = generate_synthetic_corpus(50, lib, 3);
  EXPECT_EQ(format_pairs_jsonl(pairs_of(a)), format_pairs_jsonl(pairs_of(b)));
  EXPECT_EQ(format_alignment_jsonl(a, lib), format_alignment_jsonl(b, lib));
  auto c = generate_synthetic_corpus(50, lib, 4);
  EXPECT_NE(format_pairs_jsonl(pairs_of(a)), format_pairs_jsonl(pairs_of(c)));
}

TEST(SyntheticCorpusTest, FragmentationRecoversLibraryMotifs) {
  const MotifLibrary lib = MotifLibrary::standard();
  for (const auto &ex : generate_synthetic_corpus(300, lib, 11)) {
    MolecularGraph g = parse_smiles(ex.pair.smiles);
    std::multiset<std::string> got, want;
    for (const Motif &m : fragment(g).motifs)
      got.insert(m.canonical_key);
    for (int id : ex.motifs)
      want.insert(lib.key(id));
    EXPECT_EQ(got, want) << ex.pair.smiles;
    ASSERT_EQ(ex.named.size(), ex.motifs.size());
    EXPECT_TRUE(std::find(ex.named.begin(), ex.named.end(), true) !=
                ex.named.end());
    for (std::size_t i = 0; i < ex.motifs.size(); ++i) {
      const bool mentioned =
          ex.pair.text.find(lib.motif(ex.motifs[i]).name) != std::string::npos;
      EXPECT_EQ(mentioned, static_cast<bool>(ex.named[i])) << ex.pair.text;
    }
  }
}

TEST(SyntheticCorpusTest, SplitHoldsOutWholeCombinations) {
  const MotifLibrary lib = MotifLibrary::standard();
  auto split = split_by_combination(generate_synthetic_corpus(700, lib, 5), 200, 9);
  EXPECT_GE(split.test.size(), 200u);
  EXPECT_EQ(split.train.size() + split.test.size(), 700u);
  std::set<std::vector<int>> train_combos;
  for (const auto &ex : split.train)
    train_combos.insert(ex.motifs);
  for (const auto &ex : split.test)
    EXPECT_FALSE(train_combos.contains(ex.motifs));
}

TEST(PairsJsonlTest, RoundTripAndErrors) {
  std::vector<PairExample> pairs = {{"a", "CCO", "ethanol \"quoted\""},
                                    {"b", "c1ccccc1", "benzene"}};
  const std::string text = format_pairs_jsonl(pairs);
  auto back = parse_pairs_jsonl(text + "\n\n");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].text, pairs[0].text);
  EXPECT_EQ(back[1].smiles, "c1ccccc1");
  EXPECT_THROW(parse_pairs_jsonl("{\"id\":\"a\",\"smiles\":\"C\"}\n"),
               std::runtime_error);
  EXPECT_THROW(parse_pairs_jsonl("not json\n"), std::runtime_error);
  EXPECT_THROW(parse_pairs_jsonl("{\"id\":\"a\",\"smiles\":\"C\",\"text\":\"\"}"),
               std::runtime_error);
}

}  // namespace
}  // namespace moltext
