//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/corpus.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace moltext {

std::vector<PairExample> parse_pairs_jsonl(std::string_view content) {
  std::vector<PairExample> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos)
      end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    auto fail = [&](const std::string &why) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &) {
      fail("invalid JSON");
    }
    if (!j.is_object())
      fail("record is not an object");
    PairExample p;
    for (auto [field, dest] : {std::pair{"id", &p.id},
                               std::pair{"smiles", &p.smiles},
                               std::pair{"text", &p.text}}) {
      if (!j.contains(field) || !j.at(field).is_string())
        fail(std::string("missing string field \"") + field + "\"");
      *dest = j.at(field).get<std::string>();
    }
    if (p.text.empty())
      fail("empty text");
    out.push_back(std::move(p));
  }
  return out;
}

std::string format_pairs_jsonl(std::span<const PairExample> pairs) {
  std::string out;
  for (const PairExample &p : pairs) {
    out += nlohmann::json{{"id", p.id}, {"smiles", p.smiles}, {"text", p.text}}
               .dump();
    out += '\n';
  }
  return out;
}

MotifLibrary::MotifLibrary(std::vector<LibraryMotif> motifs)
    : motifs_(std::move(motifs)) {
  std::set<std::string> names;
  bool has_ring = false;
  for (const LibraryMotif &m : motifs_) {
    if (m.name.empty() || !names.insert(m.name).second)
      throw std::invalid_argument("library: empty or duplicate name \"" +
                                  m.name + "\"");
    MolecularGraph g;
    try {
      g = parse_smiles(m.smiles);
    } catch (const SmilesError &e) {
      throw std::invalid_argument("library: motif \"" + m.name +
                                  "\": " + e.what());
    }
    const std::size_t need = m.role == MotifRole::kRing     ? 3
                             : m.role == MotifRole::kLinker ? 2
                                                            : 1;
    if (m.sites.size() < need)
      throw std::invalid_argument("library: motif \"" + m.name +
                                  "\" has too few attachment sites");
    for (int s : m.sites)
      if (s < 0 || s >= g.atom_count())
        throw std::invalid_argument("library: motif \"" + m.name +
                                    "\" has an out-of-range site");
    has_ring = has_ring || m.role == MotifRole::kRing;
    keys_.push_back(canonical_key(g));
    graphs_.push_back(std::move(g));
  }
  if (!has_ring)
    throw std::invalid_argument("library: at least one ring motif required");
}

MotifLibrary MotifLibrary::standard() {
  using R = MotifRole;
  return MotifLibrary({
      {"benzene", "c1ccccc1", R::kRing, {0, 2, 4}},
      {"pyridine", "c1ccncc1", R::kRing, {0, 2, 5}},
      {"cyclohexane", "C1CCCCC1", R::kRing, {0, 2, 4}},
      {"thiophene", "c1ccsc1", R::kRing, {0, 1, 4}},
      {"furan", "c1ccoc1", R::kRing, {0, 1, 4}},
      {"cyclopentane", "C1CCCC1", R::kRing, {0, 1, 3}},
      {"piperidine", "C1CCNCC1", R::kRing, {0, 2, 4}},
      {"morpholine", "C1COCCN1", R::kRing, {0, 3, 5}},
      {"hydroxyl", "O", R::kSubstituent, {0}},
      {"amine", "N", R::kSubstituent, {0}},
      {"fluoro", "F", R::kSubstituent, {0}},
      {"chloro", "Cl", R::kSubstituent, {0}},
      {"bromo", "Br", R::kSubstituent, {0}},
      {"carboxyl", "C(=O)O", R::kSubstituent, {0}},
      {"nitro", "[N+](=O)[O-]", R::kSubstituent, {0}},
      {"methoxy", "OC", R::kSubstituent, {0}},
      {"nitrile", "C#N", R::kSubstituent, {0}},
      {"sulfonyl", "S(=O)(=O)O", R::kSubstituent, {0}},
      {"ethyl", "CC", R::kLinker, {1, 0}},
      {"propyl", "CCC", R::kLinker, {2, 0}},
      {"sulfide", "S", R::kLinker, {0, 0}},
  });
}

int MotifLibrary::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (motifs_[i].name == name)
      return i;
  return -1;
}

bool MotifLibrary::assemblable(std::span<const int> motif_ids) const {
  std::set<int> seen;
  int rings = 0, linkers = 0, subs = 0;
  for (int id : motif_ids) {
    if (id < 0 || id >= size() || !seen.insert(id).second)
      return false;
    switch (motifs_[id].role) {
    case MotifRole::kRing:
      ++rings;
      break;
    case MotifRole::kLinker:
      ++linkers;
      break;
    case MotifRole::kSubstituent:
      ++subs;
      break;
    }
  }
  if (rings == 0 || linkers < rings - 1)
    return false;
  // Each ring has 3 sites; the chain consumes 2 per linker used.
  const int dangling = subs + linkers - (rings - 1);
  return dangling <= 3 * rings - 2 * (rings - 1);
}

MolecularGraph MotifLibrary::assemble(std::span<const int> motif_ids,
                                      std::mt19937_64 *rng) const {
  if (!assemblable(motif_ids))
    throw std::invalid_argument("motif combination cannot be assembled");
  std::vector<int> order(motif_ids.begin(), motif_ids.end());
  if (rng != nullptr)
    std::shuffle(order.begin(), order.end(), *rng);

  MolecularGraph g;
  std::map<int, int> offset;
  for (int id : order) {
    offset[id] = g.atom_count();
    const MolecularGraph &m = graphs_[id];
    for (const Atom &a : m.atoms())
      g.add_atom(a);
    for (const Bond &b : m.bonds())
      g.add_bond(b.begin + offset[id], b.end + offset[id], b.order);
  }

  std::vector<int> rings, linkers, subs;
  for (int id : motif_ids) {
    if (motifs_[id].role == MotifRole::kRing)
      rings.push_back(id);
    else if (motifs_[id].role == MotifRole::kLinker)
      linkers.push_back(id);
    else
      subs.push_back(id);
  }
  if (rng != nullptr) {
    std::shuffle(rings.begin(), rings.end(), *rng);
    std::shuffle(linkers.begin(), linkers.end(), *rng);
    std::shuffle(subs.begin(), subs.end(), *rng);
  }
  std::map<int, std::vector<int>> free_sites;
  for (int r : rings) {
    std::vector<int> s = motifs_[r].sites;
    if (rng != nullptr)
      std::shuffle(s.begin(), s.end(), *rng);
    std::reverse(s.begin(), s.end());  // pop from the back
    free_sites[r] = std::move(s);
  }
  auto take_site = [&](int ring) {
    const int s = free_sites[ring].back();
    free_sites[ring].pop_back();
    return s + offset[ring];
  };
  for (std::size_t i = 0; i + 1 < rings.size(); ++i) {
    const int link = linkers[i];
    g.add_bond(take_site(rings[i]), motifs_[link].sites[0] + offset[link],
               BondOrder::kSingle);
    g.add_bond(motifs_[link].sites[1] + offset[link], take_site(rings[i + 1]),
               BondOrder::kSingle);
  }
  for (std::size_t i = rings.size() > 0 ? rings.size() - 1 : 0;
       i < linkers.size(); ++i)
    subs.push_back(linkers[i]);
  for (int sub : subs) {
    std::vector<int> open;
    for (int r : rings)
      if (!free_sites[r].empty())
        open.push_back(r);
    int ring;
    if (rng != nullptr) {
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      ring = open[pick(*rng)];
    } else {
      ring = *std::max_element(open.begin(), open.end(), [&](int a, int b) {
        return free_sites[a].size() < free_sites[b].size();
      });
    }
    g.add_bond(take_site(ring), motifs_[sub].sites[0] + offset[sub],
               BondOrder::kSingle);
  }
  return g;
}

namespace {

const char *const kTemplates[] = {
    "this molecule contains {}",
    "a compound featuring {}",
    "structure with {} groups",
    "{} are present in this molecule",
    "an organic substance bearing {}",
};

const char *const kFillers[] = {
    "synthetic", "sample", "reported", "stable", "solid",
    "known", "derivative", "reagent", "useful", "common",
    "soluble", "pale", "crystalline", "studied", "small",
};

std::string join_names(const std::vector<std::string> &names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0)
      out += i + 1 == names.size() ? " and " : ", ";
    out += names[i];
  }
  return out;
}

std::string fill_template(const std::string &tmpl, const std::string &list) {
  const std::size_t at = tmpl.find("{}");
  return tmpl.substr(0, at) + list + tmpl.substr(at + 2);
}

}  // namespace

std::vector<SyntheticExample>
generate_synthetic_corpus(int n_examples, const MotifLibrary &library,
                          std::uint64_t seed,
                          const SyntheticCorpusOptions &options) {
  if (n_examples < 0)
    throw std::invalid_argument("n_examples must be >= 0");
  if (options.min_motifs < 1 || options.max_motifs < options.min_motifs)
    throw std::invalid_argument("invalid motif count range");
  std::mt19937_64 rng(seed);
  std::vector<SyntheticExample> out;
  std::vector<int> all(library.size());
  for (int i = 0; i < library.size(); ++i)
    all[i] = i;
  std::uniform_int_distribution<int> count_dist(options.min_motifs,
                                                options.max_motifs);
  std::bernoulli_distribution named_dist(options.name_probability);
  constexpr int kMaxAttempts = 10000;
  for (int n = 0; n < n_examples; ++n) {
    std::vector<int> chosen;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts)
        throw std::invalid_argument(
            "library cannot produce the requested motif counts");
      const int k = std::min(count_dist(rng), library.size());
      std::shuffle(all.begin(), all.end(), rng);
      chosen.assign(all.begin(), all.begin() + k);
      if (library.assemblable(chosen))
        break;
    }
    MolecularGraph g = library.assemble(chosen, &rng);
    std::sort(chosen.begin(), chosen.end());

    SyntheticExample ex;
    ex.motifs = chosen;
    ex.named.assign(chosen.size(), false);
    std::vector<int> named_idx;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      if (named_dist(rng)) {
        ex.named[i] = true;
        named_idx.push_back(static_cast<int>(i));
      }
    if (named_idx.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, chosen.size() - 1);
      const int i = static_cast<int>(pick(rng));
      ex.named[i] = true;
      named_idx.push_back(i);
    }
    std::shuffle(named_idx.begin(), named_idx.end(), rng);
    std::vector<std::string> names;
    for (int i : named_idx)
      names.push_back(library.motif(chosen[i]).name);
    std::uniform_int_distribution<std::size_t> tmpl(0, std::size(kTemplates) - 1);
    std::string text = fill_template(kTemplates[tmpl(rng)], join_names(names));
    std::uniform_int_distribution<std::size_t> filler(0, std::size(kFillers) - 1);
    for (int f = 0; f < options.filler_words; ++f) {
      text += ' ';
      text += kFillers[filler(rng)];
    }
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06d", n);
    ex.pair = PairExample{id, write_smiles(g), std::move(text)};
    out.push_back(std::move(ex));
  }
  return out;
}

std::string format_alignment_jsonl(std::span<const SyntheticExample> corpus,
                                   const MotifLibrary &library) {
  std::string out;
  for (const SyntheticExample &ex : corpus) {
    nlohmann::json motifs = nlohmann::json::array();
    for (std::size_t i = 0; i < ex.motifs.size(); ++i)
      motifs.push_back({{"name", library.motif(ex.motifs[i]).name},
                        {"key", library.key(ex.motifs[i])},
                        {"named", static_cast<bool>(ex.named[i])}});
    out += nlohmann::json{{"id", ex.pair.id}, {"motifs", motifs}}.dump();
    out += '\n';
  }
  return out;
}

CorpusSplit split_by_combination(std::vector<SyntheticExample> corpus,
                                 int test_size, std::uint64_t seed) {
  std::map<std::vector<int>, int> combo_count;
  std::vector<std::vector<int>> combos;
  for (const SyntheticExample &ex : corpus)
    if (combo_count[ex.motifs]++ == 0)
      combos.push_back(ex.motifs);
  std::mt19937_64 rng(seed);
  std::shuffle(combos.begin(), combos.end(), rng);
  std::set<std::vector<int>> held_out;
  int taken = 0;
  for (const auto &c : combos) {
    if (taken >= test_size)
      break;
    held_out.insert(c);
    taken += combo_count[c];
  }
  if (taken < test_size)
    throw std::invalid_argument("corpus too small for the requested test split");
  CorpusSplit split;
  for (SyntheticExample &ex : corpus)
    (held_out.contains(ex.motifs) ? split.test : split.train)
        .push_back(std::move(ex));
  return split;
}

std::vector<PairExample> pairs_of(std::span<const SyntheticExample> corpus) {
  std::vector<PairExample> out;
  for (const SyntheticExample &ex : corpus)
    out.push_back(ex.pair);
  return out;
}

}  // namespace moltext
