//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {
namespace {

// Leaves explored before accepting the best string found so far. Only highly
// symmetric graphs near the size limit get close to this.
constexpr int kMaxLeaves = 20000;

// Dense ranks (0 = smallest) of an arbitrary comparable signature.
template <class Sig>
std::vector<int> dense_ranks(const std::vector<Sig> &sig) {
  const int n = static_cast<int>(sig.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i)
    idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return sig[a] < sig[b]; });
  std::vector<int> rank(n);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && sig[idx[i - 1]] < sig[idx[i]])
      ++r;
    rank[idx[i]] = r;
  }
  return rank;
}

int class_count(const std::vector<int> &rank) {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
}

std::vector<int> refine(const MolecularGraph &g, std::vector<int> rank) {
  const int n = g.atom_count();
  int classes = class_count(rank);
  while (true) {
    using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
    std::vector<Sig> sig(n);
    for (int i = 0; i < n; ++i) {
      sig[i].first = rank[i];
      for (const Neighbor &nb : g.neighbors(i)) {
        sig[i].second.emplace_back(static_cast<int>(g.bond(nb.bond).order),
                                   rank[nb.atom]);
      }
      std::sort(sig[i].second.begin(), sig[i].second.end());
    }
    std::vector<int> next = dense_ranks(sig);
    const int next_classes = class_count(next);
    if (next_classes == classes)
      return rank;
    rank = std::move(next);
    classes = next_classes;
  }
}

class Canonicalizer {
public:
  explicit Canonicalizer(const MolecularGraph &g) : g_(g) {}

  std::string run() {
    const int n = g_.atom_count();
    using Init = std::tuple<int, int, int, int>;
    std::vector<Init> init(n);
    for (int i = 0; i < n; ++i) {
      const Atom &a = g_.atom(i);
      init[i] = {static_cast<int>(a.element), a.aromatic ? 1 : 0, a.charge,
                 g_.degree(i)};
    }
    search(refine(g_, dense_ranks(init)));
    return best_.value_or("");
  }

private:
  void search(const std::vector<int> &rank) {
    if (leaves_ >= kMaxLeaves)
      return;
    const int n = g_.atom_count();
    if (class_count(rank) == n) {
      ++leaves_;
      std::string s = write_smiles(g_, rank);
      if (!best_ || s < *best_)
        best_ = std::move(s);
      return;
    }
    // First non-singleton cell, by rank.
    std::vector<int> cell_size(n, 0);
    for (int r : rank)
      ++cell_size[r];
    int target = 0;
    while (cell_size[target] < 2)
      ++target;
    for (int i = 0; i < n; ++i) {
      if (rank[i] != target)
        continue;
      std::vector<std::pair<int, int>> sig(n);
      for (int j = 0; j < n; ++j)
        sig[j] = {rank[j], rank[j] == target && j != i ? 1 : 0};
      search(refine(g_, dense_ranks(sig)));
    }
  }

  const MolecularGraph &g_;
  std::optional<std::string> best_;
  int leaves_ = 0;
};

}  // namespace

std::string canonical_key(const MolecularGraph &graph) {
  if (graph.atom_count() > kMaxCanonicalAtoms)
    throw GraphSizeError("canonical_key: graph has " +
                         std::to_string(graph.atom_count()) +
                         " atoms, limit is " +
                         std::to_string(kMaxCanonicalAtoms));
  return Canonicalizer(graph).run();
}

}  // namespace moltext
