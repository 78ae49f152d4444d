//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_MOLGRAPH_H_
#define MOLTEXT_MOLGRAPH_H_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moltext/matrix.h"

namespace moltext {

// The supported element set, in feature one-hot order.
enum class Element { kB, kC, kN, kO, kP, kS, kF, kCl, kBr, kI };

inline constexpr int kElementCount = 10;

std::string_view element_symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view symbol);
// True for elements with an aromatic lowercase SMILES form (b c n o p s).
bool has_aromatic_form(Element e);

enum class BondOrder { kSingle = 1, kDouble = 2, kTriple = 3, kAromatic = 4 };

struct Atom {
  Element element = Element::kC;
  int charge = 0;
  bool aromatic = false;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int begin;
  int end;
  BondOrder order;
};

struct Neighbor {
  int atom;
  int bond;
};

// Atom features: one-hot element (10) + one-hot charge clipped to [-2, 2] (5)
// + one-hot degree clipped to 5 (6) + aromatic bit (1).
inline constexpr int kAtomFeatureWidth = kElementCount + 5 + 6 + 1;

class MolecularGraph {
public:
  int add_atom(const Atom &atom);
  // Throws std::invalid_argument on self loops, bad indices or duplicates.
  int add_bond(int a, int b, BondOrder order);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[atom].size());
  }
  // Bond index, or -1.
  int find_bond(int a, int b) const;

  bool connected() const;

  Matrix features() const;

  // Subgraph induced on `atoms`; atom i of the result is atoms[i].
  MolecularGraph induced_subgraph(std::span<const int> atoms) const;
  // Relabels atom i as new_index[i]. Bond order follows the new numbering.
  MolecularGraph permuted(std::span<const int> new_index) const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

class SmilesError : public std::runtime_error {
public:
  SmilesError(const std::string &what, std::size_t offset);
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Parses the supported SMILES subset: organic-subset and bracket atoms with
// charge, branches, ring closures (digit and %nn) and the bond symbols - = # :.
// Stereo, isotopes, atom maps and the '.' operator are rejected.
MolecularGraph parse_smiles(std::string_view text);

// Depth-first SMILES for a connected graph. Traversal starts at the atom with
// the smallest rank and visits neighbors in ascending rank order.
std::string write_smiles(const MolecularGraph &graph, std::span<const int> rank);
std::string write_smiles(const MolecularGraph &graph);

inline constexpr int kMaxCanonicalAtoms = 64;
inline constexpr int kMaxMotifPatternAtoms = 16;

class GraphSizeError : public std::length_error {
public:
  using std::length_error::length_error;
};

// Relabeling-invariant identifier: color refinement with individualization,
// then the lexicographically smallest DFS SMILES over all discrete labelings.
// The key itself parses back to an isomorphic graph.
std::string canonical_key(const MolecularGraph &graph);

struct Motif {
  std::vector<int> atom_indices;
  MolecularGraph subgraph;
  std::string canonical_key;
};

struct Fragmentation {
  std::vector<Motif> motifs;
  // Pairs (a, b), a < b, of motifs joined by a cleaved bond.
  std::vector<std::pair<int, int>> motif_adjacency;
  std::vector<int> positions;
};

// Cleaves acyclic single bonds (ring/non-ring junctions, and non-ring
// C-heteroatom bonds between atoms of degree >= 2), merges lone carbon
// fragments back, and assigns breadth-first positions.
Fragmentation fragment(const MolecularGraph &graph);

// Breadth-first positions from the motif holding atom 0; siblings enqueue by
// (canonical key, smallest atom index).
std::vector<int> bfs_order(const Fragmentation &fragmentation);

// Induced subgraph isomorphism matching element, charge, aromaticity and bond
// order.
bool contains_motif(const MolecularGraph &graph, const MolecularGraph &motif);
bool contains_motif(const MolecularGraph &graph, const Motif &motif);

}  // namespace moltext

#endif  // MOLTEXT_MOLGRAPH_H_
