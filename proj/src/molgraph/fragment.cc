//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {
namespace {

std::vector<bool> find_bridges(const MolecularGraph &g) {
  const int n = g.atom_count();
  std::vector<bool> bridge(g.bond_count(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int u, int via_bond) {
    disc[u] = low[u] = timer++;
    for (const Neighbor &nb : g.neighbors(u)) {
      if (nb.bond == via_bond)
        continue;
      if (disc[nb.atom] >= 0) {
        low[u] = std::min(low[u], disc[nb.atom]);
      } else {
        dfs(nb.atom, nb.bond);
        low[u] = std::min(low[u], low[nb.atom]);
        if (low[nb.atom] > disc[u])
          bridge[nb.bond] = true;
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    if (disc[i] < 0)
      dfs(i, -1);
  }
  return bridge;
}

bool is_heteroatom_for_cleavage(Element e) {
  return e == Element::kN || e == Element::kO || e == Element::kS ||
         e == Element::kP;
}

struct DisjointSet {
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> parent;
};

}  // namespace

Fragmentation fragment(const MolecularGraph &graph) {
  const int n = graph.atom_count();
  if (n == 0)
    throw std::invalid_argument("fragment: empty graph");
  if (!graph.connected())
    throw std::invalid_argument("fragment: graph is not connected");

  const std::vector<bool> bridge = find_bridges(graph);
  std::vector<bool> on_ring(n, false);
  for (int b = 0; b < graph.bond_count(); ++b) {
    if (!bridge[b]) {
      on_ring[graph.bond(b).begin] = true;
      on_ring[graph.bond(b).end] = true;
    }
  }

  std::vector<bool> cleaved(graph.bond_count(), false);
  for (int b = 0; b < graph.bond_count(); ++b) {
    const Bond &bond = graph.bond(b);
    if (!bridge[b] || bond.order != BondOrder::kSingle)
      continue;
    const int u = bond.begin, v = bond.end;
    // Ring / side-chain junction.
    if (on_ring[u] != on_ring[v]) {
      cleaved[b] = true;
      continue;
    }
    // Acyclic carbon-heteroatom bond between two interior atoms.
    if (!on_ring[u] && !on_ring[v] && graph.degree(u) >= 2 &&
        graph.degree(v) >= 2) {
      const Element eu = graph.atom(u).element, ev = graph.atom(v).element;
      if ((eu == Element::kC && is_heteroatom_for_cleavage(ev)) ||
          (ev == Element::kC && is_heteroatom_for_cleavage(eu)))
        cleaved[b] = true;
    }
  }

  DisjointSet pieces(n);
  for (int b = 0; b < graph.bond_count(); ++b) {
    if (!cleaved[b])
      pieces.unite(graph.bond(b).begin, graph.bond(b).end);
  }
  std::vector<int> piece_size(n, 0);
  for (int i = 0; i < n; ++i)
    ++piece_size[pieces.find(i)];

  // Lone carbon pieces rejoin every neighbor across their cleaved bonds. Two
  // lone carbons never share a cleaved bond, so one pass suffices.
  DisjointSet merged = pieces;
  for (int b = 0; b < graph.bond_count(); ++b) {
    if (!cleaved[b])
      continue;
    const int u = graph.bond(b).begin, v = graph.bond(b).end;
    const bool lone_u = piece_size[pieces.find(u)] == 1 &&
                        graph.atom(u).element == Element::kC;
    const bool lone_v = piece_size[pieces.find(v)] == 1 &&
                        graph.atom(v).element == Element::kC;
    if (lone_u || lone_v)
      merged.unite(u, v);
  }

  // Motifs ordered by their smallest atom index.
  std::vector<int> motif_of_root(n, -1);
  Fragmentation frag;
  std::vector<int> motif_of_atom(n);
  for (int i = 0; i < n; ++i) {
    const int root = merged.find(i);
    if (motif_of_root[root] < 0) {
      motif_of_root[root] = static_cast<int>(frag.motifs.size());
      frag.motifs.emplace_back();
    }
    motif_of_atom[i] = motif_of_root[root];
    frag.motifs[motif_of_atom[i]].atom_indices.push_back(i);
  }
  for (Motif &m : frag.motifs) {
    m.subgraph = graph.induced_subgraph(m.atom_indices);
    m.canonical_key = canonical_key(m.subgraph);
  }

  std::set<std::pair<int, int>> edges;
  for (int b = 0; b < graph.bond_count(); ++b) {
    const int a = motif_of_atom[graph.bond(b).begin];
    const int c = motif_of_atom[graph.bond(b).end];
    if (a != c)
      edges.insert({std::min(a, c), std::max(a, c)});
  }
  frag.motif_adjacency.assign(edges.begin(), edges.end());
  frag.positions = bfs_order(frag);
  return frag;
}

std::vector<int> bfs_order(const Fragmentation &fragmentation) {
  const auto &motifs = fragmentation.motifs;
  const int count = static_cast<int>(motifs.size());
  std::vector<int> positions(count, -1);
  if (count == 0)
    return positions;

  std::vector<std::vector<int>> adj(count);
  for (const auto &[a, b] : fragmentation.motif_adjacency) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  auto min_atom = [&](int m) {
    return *std::min_element(motifs[m].atom_indices.begin(),
                             motifs[m].atom_indices.end());
  };
  auto before = [&](int x, int y) {
    return std::forward_as_tuple(motifs[x].canonical_key, min_atom(x)) <
           std::forward_as_tuple(motifs[y].canonical_key, min_atom(y));
  };

  int root = 0;
  for (int m = 0; m < count; ++m) {
    if (min_atom(m) == 0)
      root = m;
  }
  std::deque<int> queue = {root};
  positions[root] = 0;
  int next = 1;
  while (!queue.empty()) {
    const int m = queue.front();
    queue.pop_front();
    std::vector<int> fresh;
    for (int nb : adj[m]) {
      if (positions[nb] < 0)
        fresh.push_back(nb);
    }
    std::sort(fresh.begin(), fresh.end(), before);
    for (int nb : fresh) {
      positions[nb] = next++;
      queue.push_back(nb);
    }
  }
  if (next != count)
    throw std::invalid_argument("bfs_order: motif adjacency is not connected");
  return positions;
}

}  // namespace moltext
