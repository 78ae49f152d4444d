//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_CORPUS_H_
#define MOLTEXT_CORPUS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {

struct PairExample {
  std::string id;
  std::string smiles;
  std::string text;
};

// Reads {"id","smiles","text"} records, one per line. Blank lines are skipped.
// Throws std::runtime_error naming the line on malformed records.
std::vector<PairExample> parse_pairs_jsonl(std::string_view content);
std::string format_pairs_jsonl(std::span<const PairExample> pairs);

enum class MotifRole { kRing, kSubstituent, kLinker };

struct LibraryMotif {
  std::string name;    // text used in descriptions
  std::string smiles;
  MotifRole role = MotifRole::kSubstituent;
  // Atom indices (in `smiles` order) that may carry a bond to another motif.
  // Substituents use the first site; linkers use the first two.
  std::vector<int> sites;
};

class MotifLibrary {
public:
  // Throws std::invalid_argument on unparsable SMILES, bad sites, empty or
  // duplicate names, or a library without rings.
  explicit MotifLibrary(std::vector<LibraryMotif> motifs);
  static MotifLibrary standard();

  int size() const { return static_cast<int>(motifs_.size()); }
  const LibraryMotif &motif(int i) const { return motifs_.at(i); }
  const MolecularGraph &graph(int i) const { return graphs_.at(i); }
  const std::string &key(int i) const { return keys_.at(i); }
  // -1 when absent.
  int find(std::string_view name) const;

  // Whether `motif_ids` can be assembled: distinct, >= 1 ring, and every
  // ring after the first reachable through its own linker, with free sites
  // left for all substituents.
  bool assemblable(std::span<const int> motif_ids) const;

  // Joins the motifs with single bonds: rings chained through linkers, then
  // substituents on free ring sites. With `rng`, site choice and atom order
  // are shuffled; otherwise the layout is deterministic.
  MolecularGraph assemble(std::span<const int> motif_ids,
                          std::mt19937_64 *rng = nullptr) const;

private:
  std::vector<LibraryMotif> motifs_;
  std::vector<MolecularGraph> graphs_;
  std::vector<std::string> keys_;
};

struct SyntheticExample {
  PairExample pair;
  std::vector<int> motifs;  // library indices, ascending
  std::vector<bool> named;  // parallel to `motifs`
};

struct SyntheticCorpusOptions {
  int min_motifs = 2;
  int max_motifs = 4;
  double name_probability = 0.75;
  int filler_words = 3;
};

std::vector<SyntheticExample>
generate_synthetic_corpus(int n_examples, const MotifLibrary &library,
                          std::uint64_t seed,
                          const SyntheticCorpusOptions &options = {});

// {"id","motifs":[{"name","key","named"}]} per example.
std::string format_alignment_jsonl(std::span<const SyntheticExample> corpus,
                                   const MotifLibrary &library);

struct CorpusSplit {
  std::vector<SyntheticExample> train;
  std::vector<SyntheticExample> test;
};

// Moves whole motif combinations to the test side until it holds at least
// `test_size` examples, so no test combination occurs in training.
CorpusSplit split_by_combination(std::vector<SyntheticExample> corpus,
                                 int test_size, std::uint64_t seed);

std::vector<PairExample> pairs_of(std::span<const SyntheticExample> corpus);

}  // namespace moltext

#endif  // MOLTEXT_CORPUS_H_
