//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {
namespace {

constexpr std::array<std::string_view, kElementCount> kSymbols = {
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};

}  // namespace

std::string_view element_symbol(Element e) {
  return kSymbols[static_cast<int>(e)];
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (int i = 0; i < kElementCount; ++i) {
    if (kSymbols[i] == symbol)
      return static_cast<Element>(i);
  }
  return std::nullopt;
}

bool has_aromatic_form(Element e) {
  switch (e) {
  case Element::kB:
  case Element::kC:
  case Element::kN:
  case Element::kO:
  case Element::kP:
  case Element::kS:
    return true;
  default:
    return false;
  }
}

int MolecularGraph::add_atom(const Atom &atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return atom_count() - 1;
}

int MolecularGraph::add_bond(int a, int b, BondOrder order) {
  if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
    throw std::invalid_argument("bond endpoint out of range");
  if (a == b)
    throw std::invalid_argument("bond endpoints must differ");
  if (find_bond(a, b) >= 0)
    throw std::invalid_argument("duplicate bond " + std::to_string(a) + "-" +
                                std::to_string(b));
  const int id = bond_count();
  bonds_.push_back({a, b, order});
  adjacency_[a].push_back({b, id});
  adjacency_[b].push_back({a, id});
  return id;
}

int MolecularGraph::find_bond(int a, int b) const {
  const auto &smaller =
      adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a]
                                                   : adjacency_[b];
  const int other = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
  for (const Neighbor &n : smaller) {
    if (n.atom == other)
      return n.bond;
  }
  return -1;
}

bool MolecularGraph::connected() const {
  if (atoms_.empty())
    return true;
  std::vector<bool> seen(atoms_.size(), false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const Neighbor &n : adjacency_[u]) {
      if (!seen[n.atom]) {
        seen[n.atom] = true;
        ++visited;
        stack.push_back(n.atom);
      }
    }
  }
  return visited == atom_count();
}

Matrix MolecularGraph::features() const {
  Matrix x(atom_count(), kAtomFeatureWidth);
  for (int i = 0; i < atom_count(); ++i) {
    const Atom &a = atoms_[i];
    x(i, static_cast<int>(a.element)) = 1.0;
    const int charge = std::clamp(a.charge, -2, 2);
    x(i, kElementCount + charge + 2) = 1.0;
    const int deg = std::min(degree(i), 5);
    x(i, kElementCount + 5 + deg) = 1.0;
    x(i, kAtomFeatureWidth - 1) = a.aromatic ? 1.0 : 0.0;
  }
  return x;
}

MolecularGraph MolecularGraph::induced_subgraph(std::span<const int> atoms) const {
  std::vector<int> local(atoms_.size(), -1);
  MolecularGraph sub;
  for (int a : atoms) {
    if (a < 0 || a >= atom_count() || local[a] >= 0)
      throw std::invalid_argument("invalid or repeated atom in subgraph");
    local[a] = sub.add_atom(atoms_[a]);
  }
  for (const Bond &b : bonds_) {
    if (local[b.begin] >= 0 && local[b.end] >= 0)
      sub.add_bond(local[b.begin], local[b.end], b.order);
  }
  return sub;
}

MolecularGraph MolecularGraph::permuted(std::span<const int> new_index) const {
  if (static_cast<int>(new_index.size()) != atom_count())
    throw std::invalid_argument("permutation size mismatch");
  std::vector<int> old_of(atoms_.size(), -1);
  for (int i = 0; i < atom_count(); ++i) {
    const int j = new_index[i];
    if (j < 0 || j >= atom_count() || old_of[j] >= 0)
      throw std::invalid_argument("not a permutation");
    old_of[j] = i;
  }
  MolecularGraph out;
  for (int j = 0; j < atom_count(); ++j)
    out.add_atom(atoms_[old_of[j]]);
  std::vector<Bond> relabeled;
  relabeled.reserve(bonds_.size());
  for (const Bond &b : bonds_) {
    int u = new_index[b.begin], v = new_index[b.end];
    if (u > v)
      std::swap(u, v);
    relabeled.push_back({u, v, b.order});
  }
  std::sort(relabeled.begin(), relabeled.end(),
            [](const Bond &x, const Bond &y) {
              return std::tie(x.begin, x.end) < std::tie(y.begin, y.end);
            });
  for (const Bond &b : relabeled)
    out.add_bond(b.begin, b.end, b.order);
  return out;
}

}  // namespace moltext
