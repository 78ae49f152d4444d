//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <string>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {
namespace {

class SubgraphMatcher {
public:
  SubgraphMatcher(const MolecularGraph &target, const MolecularGraph &pattern)
      : target_(target), pattern_(pattern),
        target_bonds_(static_cast<std::size_t>(target.atom_count()) *
                          target.atom_count(),
                      0),
        mapping_(pattern.atom_count(), -1),
        used_(target.atom_count(), false) {
    const int tn = target.atom_count();
    for (const Bond &b : target.bonds()) {
      const int o = static_cast<int>(b.order);
      target_bonds_[b.begin * tn + b.end] = o;
      target_bonds_[b.end * tn + b.begin] = o;
    }
    plan_order();
  }

  bool run() { return extend(0); }

private:
  // Pattern atoms in BFS order from the highest-degree atom of each
  // component, so every atom after the first of its component has a mapped
  // anchor neighbor.
  void plan_order() {
    const int pn = pattern_.atom_count();
    std::vector<bool> placed(pn, false);
    anchor_.assign(pn, -1);
    while (static_cast<int>(order_.size()) < pn) {
      int seed = -1;
      for (int i = 0; i < pn; ++i) {
        if (!placed[i] &&
            (seed < 0 || pattern_.degree(i) > pattern_.degree(seed)))
          seed = i;
      }
      placed[seed] = true;
      std::size_t head = order_.size();
      order_.push_back(seed);
      while (head < order_.size()) {
        const int u = order_[head++];
        std::vector<int> next;
        for (const Neighbor &nb : pattern_.neighbors(u)) {
          if (!placed[nb.atom]) {
            placed[nb.atom] = true;
            anchor_[nb.atom] = u;
            next.push_back(nb.atom);
          }
        }
        std::stable_sort(next.begin(), next.end(), [&](int a, int b) {
          return pattern_.degree(a) > pattern_.degree(b);
        });
        order_.insert(order_.end(), next.begin(), next.end());
      }
    }
  }

  bool feasible(int p, int t) const {
    if (used_[t] || !(target_.atom(t) == pattern_.atom(p)) ||
        target_.degree(t) < pattern_.degree(p))
      return false;
    const int tn = target_.atom_count();
    for (int q = 0; q < pattern_.atom_count(); ++q) {
      const int mq = mapping_[q];
      if (mq < 0)
        continue;
      const int pb = pattern_.find_bond(p, q);
      const int want = pb < 0 ? 0 : static_cast<int>(pattern_.bond(pb).order);
      if (target_bonds_[t * tn + mq] != want)
        return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size())
      return true;
    const int p = order_[depth];
    auto try_target = [&](int t) {
      if (!feasible(p, t))
        return false;
      mapping_[p] = t;
      used_[t] = true;
      const bool ok = extend(depth + 1);
      mapping_[p] = -1;
      used_[t] = false;
      return ok;
    };
    if (anchor_[p] >= 0) {
      for (const Neighbor &nb : target_.neighbors(mapping_[anchor_[p]])) {
        if (try_target(nb.atom))
          return true;
      }
      return false;
    }
    for (int t = 0; t < target_.atom_count(); ++t) {
      if (try_target(t))
        return true;
    }
    return false;
  }

  const MolecularGraph &target_;
  const MolecularGraph &pattern_;
  std::vector<int> target_bonds_;
  std::vector<int> mapping_;
  std::vector<bool> used_;
  std::vector<int> order_;
  std::vector<int> anchor_;
};

}  // namespace

bool contains_motif(const MolecularGraph &graph, const MolecularGraph &motif) {
  if (motif.atom_count() > kMaxMotifPatternAtoms)
    throw GraphSizeError("contains_motif: motif has " +
                         std::to_string(motif.atom_count()) +
                         " atoms, limit is " +
                         std::to_string(kMaxMotifPatternAtoms));
  if (motif.atom_count() > graph.atom_count() ||
      motif.bond_count() > graph.bond_count())
    return false;
  if (motif.atom_count() == 0)
    return true;
  return SubgraphMatcher(graph, motif).run();
}

bool contains_motif(const MolecularGraph &graph, const Motif &motif) {
  return contains_motif(graph, motif.subgraph);
}

}  // namespace moltext
