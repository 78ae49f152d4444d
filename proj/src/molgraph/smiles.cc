//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <array>
#include <cstdlib>
#include <map>
#include <set>
#include <numeric>
#include <string>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {

SmilesError::SmilesError(const std::string &what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      offset_(offset) {}

namespace {

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

struct BranchOpening {
  int atom;
  std::size_t offset;
  int atoms_at_open;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text) : text_(text) {}

  MolecularGraph parse() {
    if (text_.empty())
      throw SmilesError("empty SMILES", 0);
    while (pos_ < text_.size()) {
      const unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c >= 0x80)
        throw SmilesError("non-ASCII byte", pos_);
      switch (c) {
      case '(':
        open_branch();
        break;
      case ')':
        close_branch();
        break;
      case '-':
      case '=':
      case '#':
      case ':':
        set_bond(c);
        break;
      case '%':
      case '0':
      case '1':
      case '2':
      case '3':
      case '4':
      case '5':
      case '6':
      case '7':
      case '8':
      case '9':
        ring_bond();
        break;
      case '[':
        attach(bracket_atom());
        break;
      case '.':
        throw SmilesError("multi-fragment '.' not supported", pos_);
      default:
        attach(organic_atom());
        break;
      }
    }
    if (pending_)
      throw SmilesError("dangling bond", pending_offset_);
    if (!rings_.empty()) {
      std::size_t first = text_.size();
      for (const auto &[num, r] : rings_)
        first = std::min(first, r.offset);
      throw SmilesError("unclosed ring bond", first);
    }
    if (!branches_.empty())
      throw SmilesError("unclosed branch", branches_.back().offset);
    return std::move(graph_);
  }

private:
  void open_branch() {
    if (prev_ < 0)
      throw SmilesError("branch without a preceding atom", pos_);
    if (pending_)
      throw SmilesError("bond before branch", pending_offset_);
    branches_.push_back({prev_, pos_, graph_.atom_count()});
    ++pos_;
  }

  void close_branch() {
    if (branches_.empty())
      throw SmilesError("unbalanced ')'", pos_);
    if (pending_)
      throw SmilesError("dangling bond", pending_offset_);
    const BranchOpening b = branches_.back();
    if (graph_.atom_count() == b.atoms_at_open)
      throw SmilesError("empty branch", b.offset);
    branches_.pop_back();
    prev_ = b.atom;
    ++pos_;
  }

  void set_bond(char c) {
    if (pending_)
      throw SmilesError("consecutive bond symbols", pos_);
    switch (c) {
    case '-':
      pending_ = BondOrder::kSingle;
      break;
    case '=':
      pending_ = BondOrder::kDouble;
      break;
    case '#':
      pending_ = BondOrder::kTriple;
      break;
    default:
      pending_ = BondOrder::kAromatic;
      break;
    }
    pending_offset_ = pos_;
    ++pos_;
  }

  BondOrder default_order(int a, int b) const {
    return graph_.atom(a).aromatic && graph_.atom(b).aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void connect(int a, int b, BondOrder order, std::size_t offset) {
    if (a == b)
      throw SmilesError("ring bond to itself", offset);
    if (graph_.find_bond(a, b) >= 0)
      throw SmilesError("duplicate bond", offset);
    graph_.add_bond(a, b, order);
  }

  void ring_bond() {
    const std::size_t start = pos_;
    int number;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() + 0 ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        throw SmilesError("malformed %nn ring bond", start);
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0)
      throw SmilesError("ring bond without a preceding atom", start);

    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_.emplace(number, RingOpening{prev_, pending_, start});
    } else {
      const RingOpening open = it->second;
      rings_.erase(it);
      if (open.order && pending_ && *open.order != *pending_)
        throw SmilesError("conflicting ring bond orders", start);
      const BondOrder order = open.order   ? *open.order
                              : pending_   ? *pending_
                                           : default_order(open.atom, prev_);
      connect(open.atom, prev_, order, start);
    }
    pending_.reset();
  }

  void attach(int atom) {
    if (prev_ >= 0) {
      const BondOrder order = pending_ ? *pending_ : default_order(prev_, atom);
      connect(prev_, atom, order, pending_ ? pending_offset_ : pos_);
    } else if (pending_) {
      throw SmilesError("bond without a preceding atom", pending_offset_);
    }
    pending_.reset();
    prev_ = atom;
  }

  int organic_atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    Atom atom;
    auto next_is = [&](char n) {
      return pos_ + 1 < text_.size() && text_[pos_ + 1] == n;
    };
    if (c == 'C' && next_is('l')) {
      atom.element = Element::kCl;
      pos_ += 2;
    } else if (c == 'B' && next_is('r')) {
      atom.element = Element::kBr;
      pos_ += 2;
    } else if (std::isupper(static_cast<unsigned char>(c)) &&
               std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      atom.element = *element_from_symbol(std::string_view(&c, 1));
      ++pos_;
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      const char upper = static_cast<char>(std::toupper(c));
      atom.element = *element_from_symbol(std::string_view(&upper, 1));
      atom.aromatic = true;
      ++pos_;
    } else {
      throw SmilesError(std::string("unsupported symbol '") + c + "'", start);
    }
    return graph_.add_atom(atom);
  }

  int bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;
    auto at_end = [&] { return pos_ >= text_.size(); };
    if (at_end())
      throw SmilesError("unterminated bracket atom", open);
    if (std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw SmilesError("isotopes not supported", pos_);

    Atom atom;
    const std::size_t sym_at = pos_;
    const char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      if (std::string_view("bcnops").find(c) == std::string_view::npos)
        throw SmilesError(std::string("unsupported symbol '") + c + "'", sym_at);
      const char upper = static_cast<char>(std::toupper(c));
      atom.element = *element_from_symbol(std::string_view(&upper, 1));
      atom.aromatic = true;
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::optional<Element> e;
      if (pos_ + 1 < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        e = element_from_symbol(text_.substr(pos_, 2));
        if (e)
          pos_ += 2;
      }
      if (!e) {
        e = element_from_symbol(text_.substr(pos_, 1));
        if (!e || (pos_ + 1 < text_.size() &&
                   std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
                   text_[pos_ + 1] != 'H'))
          throw SmilesError("unsupported element", sym_at);
        ++pos_;
      }
      atom.element = *e;
    } else {
      throw SmilesError(std::string("unsupported symbol '") + c + "'", sym_at);
    }

    if (!at_end() && text_[pos_] == '@')
      throw SmilesError("stereochemistry not supported", pos_);
    if (!at_end() && text_[pos_] == 'H') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      int magnitude = 1;
      ++pos_;
      if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = 0;
        while (!at_end() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          magnitude = magnitude * 10 + (text_[pos_] - '0');
          ++pos_;
        }
      } else {
        while (!at_end() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    if (at_end())
      throw SmilesError("unterminated bracket atom", open);
    if (text_[pos_] != ']')
      throw SmilesError(std::string("unsupported symbol '") + text_[pos_] +
                            "' in bracket atom",
                        pos_);
    ++pos_;
    return graph_.add_atom(atom);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  MolecularGraph graph_;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::size_t pending_offset_ = 0;
  std::map<int, RingOpening> rings_;
  std::vector<BranchOpening> branches_;
};

std::string atom_token(const Atom &a) {
  std::string sym(element_symbol(a.element));
  if (a.aromatic)
    sym[0] = static_cast<char>(std::tolower(sym[0]));
  if (a.charge == 0)
    return sym;
  std::string out = "[" + sym + (a.charge > 0 ? "+" : "-");
  if (std::abs(a.charge) > 1)
    out += std::to_string(std::abs(a.charge));
  return out + "]";
}

std::string bond_token(const MolecularGraph &g, int a, int b, BondOrder o) {
  const bool both_aromatic = g.atom(a).aromatic && g.atom(b).aromatic;
  switch (o) {
  case BondOrder::kSingle:
    return both_aromatic ? "-" : "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_label(int n) {
  return n < 10 ? std::to_string(n) : "%" + std::to_string(n);
}

class SmilesWriter {
public:
  SmilesWriter(const MolecularGraph &g, std::span<const int> rank)
      : g_(g), rank_(rank), visited_(g.atom_count(), false),
        parent_(g.atom_count(), -1), children_(g.atom_count()),
        ring_edges_(g.atom_count()) {}

  std::string write() {
    const int n = g_.atom_count();
    if (n == 0)
      return "";
    if (!g_.connected())
      throw std::invalid_argument("cannot write a disconnected graph");
    int start = 0;
    for (int i = 1; i < n; ++i) {
      if (rank_[i] < rank_[start])
        start = i;
    }
    plan(start);
    emit(start);
    return out_;
  }

private:
  std::vector<int> sorted_neighbors(int u) const {
    std::vector<int> nbrs;
    for (const Neighbor &nb : g_.neighbors(u))
      nbrs.push_back(nb.atom);
    std::sort(nbrs.begin(), nbrs.end(),
              [&](int a, int b) { return rank_[a] < rank_[b]; });
    return nbrs;
  }

  // Builds the DFS tree; non-tree edges become ring closures, opened at the
  // ancestor and closed at the descendant.
  void plan(int u) {
    visited_[u] = true;
    order_.push_back(u);
    for (int v : sorted_neighbors(u)) {
      if (v == parent_[u])
        continue;
      if (visited_[v]) {
        if (!closed_.contains({std::min(u, v), std::max(u, v)})) {
          closed_.insert({std::min(u, v), std::max(u, v)});
          // v is an ancestor already emitted; u closes the ring.
          ring_edges_[v].push_back({u, true});
          ring_edges_[u].push_back({v, false});
        }
        continue;
      }
      parent_[v] = u;
      children_[u].push_back(v);
      plan(v);
    }
  }

  void emit(int u) {
    out_ += atom_token(g_.atom(u));
    // Closings first keep digits small, then openings in partner DFS order.
    auto &edges = ring_edges_[u];
    std::vector<std::pair<int, bool>> closings, openings;
    for (const auto &e : edges)
      (e.second ? openings : closings).push_back(e);
    auto dfs_pos = [&](int a) {
      return std::find(order_.begin(), order_.end(), a) - order_.begin();
    };
    std::sort(closings.begin(), closings.end(), [&](auto &x, auto &y) {
      return dfs_pos(x.first) < dfs_pos(y.first);
    });
    std::sort(openings.begin(), openings.end(), [&](auto &x, auto &y) {
      return dfs_pos(x.first) < dfs_pos(y.first);
    });
    for (const auto &[partner, _] : closings) {
      const auto key = std::make_pair(partner, u);
      const int label = digit_of_.at(key);
      out_ += ring_label(label);
      in_use_[label] = false;
    }
    for (const auto &[partner, _] : openings) {
      int label = 1;
      while (in_use_[label])
        ++label;
      if (label > 99)
        throw std::length_error("too many open ring closures");
      in_use_[label] = true;
      digit_of_[{u, partner}] = label;
      const Bond &b = g_.bond(g_.find_bond(u, partner));
      out_ += bond_token(g_, u, partner, b.order);
      out_ += ring_label(label);
    }
    const auto &kids = children_[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const int v = kids[i];
      const Bond &b = g_.bond(g_.find_bond(u, v));
      const std::string bond = bond_token(g_, u, v, b.order);
      if (i + 1 < kids.size()) {
        out_ += "(" + bond;
        emit(v);
        out_ += ")";
      } else {
        out_ += bond;
        emit(v);
      }
    }
  }

  const MolecularGraph &g_;
  std::span<const int> rank_;
  std::vector<bool> visited_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<std::pair<int, bool>>> ring_edges_;
  std::set<std::pair<int, int>> closed_;
  std::map<std::pair<int, int>, int> digit_of_;
  std::array<bool, 101> in_use_{};
  std::vector<int> order_;
  std::string out_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text) {
  return SmilesParser(text).parse();
}

std::string write_smiles(const MolecularGraph &graph, std::span<const int> rank) {
  if (static_cast<int>(rank.size()) != graph.atom_count())
    throw std::invalid_argument("rank size mismatch");
  return SmilesWriter(graph, rank).write();
}

std::string write_smiles(const MolecularGraph &graph) {
  std::vector<int> rank(graph.atom_count());
  std::iota(rank.begin(), rank.end(), 0);
  return write_smiles(graph, rank);
}

}  // namespace moltext
