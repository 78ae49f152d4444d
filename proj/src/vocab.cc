//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/vocab.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace moltext {
namespace {

constexpr std::string_view kHeaderTag = "moltext-vocab";

std::string header_line(std::string_view kind) {
  std::string out(kHeaderTag);
  out += "\tversion=" + std::to_string(kVocabFormatVersion) + "\t";
  out += kind;
  out += "\n";
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::int64_t parse_int(std::string_view s, int line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw VocabFormatError("line " + std::to_string(line_no) +
                           ": expected integer, got '" + std::string(s) + "'");
  return v;
}

struct Row {
  int id;
  std::string token;
  std::int64_t count;
  bool maskable;
};

std::vector<Row> parse_rows(std::string_view text, std::string_view kind) {
  std::vector<Row> rows;
  std::size_t pos = 0;
  int line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (!header_seen) {
      auto f = split_tabs(line);
      if (f.size() != 3 || f[0] != kHeaderTag)
        throw VocabFormatError("missing vocabulary header");
      if (f[1] != "version=" + std::to_string(kVocabFormatVersion))
        throw VocabFormatError("unsupported vocabulary format " +
                               std::string(f[1]));
      if (f[2] != kind)
        throw VocabFormatError("expected a " + std::string(kind) +
                               " vocabulary, found " + std::string(f[2]));
      header_seen = true;
      continue;
    }
    if (line.empty())
      continue;
    auto f = split_tabs(line);
    if (f.size() != 4)
      throw VocabFormatError("line " + std::to_string(line_no) +
                             ": expected 4 tab-separated fields");
    Row r;
    r.id = static_cast<int>(parse_int(f[0], line_no));
    r.token = std::string(f[1]);
    r.count = parse_int(f[2], line_no);
    const auto m = parse_int(f[3], line_no);
    if (m != 0 && m != 1)
      throw VocabFormatError("line " + std::to_string(line_no) +
                             ": maskable flag must be 0 or 1");
    r.maskable = m == 1;
    if (r.id != static_cast<int>(rows.size()))
      throw VocabFormatError("line " + std::to_string(line_no) +
                             ": label ids must be dense and ascending");
    rows.push_back(std::move(r));
  }
  if (!header_seen)
    throw VocabFormatError("missing vocabulary header");
  return rows;
}

}  // namespace

MotifVocab
MotifVocab::from_counts(const std::map<std::string, std::int64_t> &counts) {
  std::vector<std::pair<std::string, std::int64_t>> items(counts.begin(),
                                                          counts.end());
  std::stable_sort(items.begin(), items.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;  // map order already sorts keys ascending
  });
  MotifVocab v;
  for (auto &[key, count] : items) {
    if (count < 1)
      throw std::invalid_argument("motif counts must be >= 1");
    v.index_.emplace(key, v.size());
    v.entries_.push_back({key, count, false});
  }
  v.maskable_index_.assign(v.entries_.size(), -1);
  return v;
}

int MotifVocab::lookup(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? kUnknownMotifLabel : it->second;
}

void MotifVocab::set_maskable(const std::set<int> &ids) {
  for (int id : ids) {
    if (id < 0 || id >= size())
      throw std::out_of_range("maskable id outside vocabulary");
  }
  maskable_ids_.clear();
  maskable_index_.assign(entries_.size(), -1);
  for (int id = 0; id < size(); ++id) {
    entries_[id].maskable = ids.contains(id);
    if (entries_[id].maskable) {
      maskable_index_[id] = static_cast<int>(maskable_ids_.size());
      maskable_ids_.push_back(id);
    }
  }
}

int MotifVocab::maskable_index(int id) const {
  if (id < 0 || id >= size())
    return -1;
  return maskable_index_[id];
}

std::string MotifVocab::serialize() const {
  std::string out = header_line("motif");
  for (int id = 0; id < size(); ++id) {
    const MotifEntry &e = entries_[id];
    out += std::to_string(id) + "\t" + e.key + "\t" + std::to_string(e.count) +
           "\t" + (e.maskable ? "1" : "0") + "\n";
  }
  return out;
}

MotifVocab MotifVocab::parse(std::string_view text) {
  MotifVocab v;
  std::set<int> maskable;
  for (Row &r : parse_rows(text, "motif")) {
    if (r.count < 1)
      throw VocabFormatError("motif '" + r.token + "' has count < 1");
    if (!v.index_.emplace(r.token, r.id).second)
      throw VocabFormatError("duplicate motif '" + r.token + "'");
    if (r.maskable)
      maskable.insert(r.id);
    v.entries_.push_back({std::move(r.token), r.count, false});
  }
  v.set_maskable(maskable);
  return v;
}

MotifVocabBuild build_motif_vocab(std::span<const std::string> smiles) {
  if (smiles.empty())
    throw std::invalid_argument("build_motif_vocab: empty corpus");
  std::map<std::string, std::int64_t> counts;
  VocabBuildReport report;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    try {
      const Fragmentation f = fragment(parse_smiles(smiles[i]));
      for (const Motif &m : f.motifs)
        ++counts[m.canonical_key];
      ++report.molecules;
    } catch (const std::exception &e) {
      ++report.skipped;
      if (report.errors.size() < 20)
        report.errors.push_back(std::to_string(i) + ": " + e.what());
    }
  }
  if (counts.empty())
    throw std::invalid_argument("build_motif_vocab: no molecule could be parsed");
  return {MotifVocab::from_counts(counts), std::move(report)};
}

std::set<int> build_masking_set(const MotifVocab &vocab, std::int64_t min_count,
                                std::int64_t max_count) {
  if (min_count > max_count)
    throw std::invalid_argument("build_masking_set: min_count > max_count");
  std::set<int> ids;
  for (int id = 0; id < vocab.size(); ++id) {
    const std::int64_t c = vocab.entry(id).count;
    if (c >= min_count && c <= max_count)
      ids.insert(id);
  }
  return ids;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty())
    words.push_back(std::move(current));
  return words;
}

WordVocab::WordVocab() {
  words_ = {"<PAD>", "<CLS>", "<MASK>", "<UNK>"};
  counts_ = {0, 0, 0, 0};
  for (int i = 0; i < kFirstWord; ++i)
    index_.emplace(words_[i], i);
}

WordVocab WordVocab::build(std::span<const std::string> texts,
                           int min_frequency) {
  std::map<std::string, std::int64_t> counts;
  for (const std::string &t : texts) {
    for (std::string &w : split_words(t))
      ++counts[std::move(w)];
  }
  std::vector<std::pair<std::string, std::int64_t>> items;
  for (auto &[w, c] : counts) {
    if (c >= min_frequency)
      items.emplace_back(w, c);
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  WordVocab v;
  for (auto &[w, c] : items) {
    v.index_.emplace(w, v.size());
    v.words_.push_back(w);
    v.counts_.push_back(c);
  }
  return v;
}

int WordVocab::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end() || is_reserved(it->second))
    return kUnk;
  return it->second;
}

std::string WordVocab::serialize() const {
  std::string out = header_line("word");
  for (int id = 0; id < size(); ++id) {
    out += std::to_string(id) + "\t" + words_[id] + "\t" +
           std::to_string(counts_[id]) + "\t" + (is_reserved(id) ? "0" : "1") +
           "\n";
  }
  return out;
}

WordVocab WordVocab::parse(std::string_view text) {
  std::vector<Row> rows = parse_rows(text, "word");
  WordVocab v;
  if (rows.size() < static_cast<std::size_t>(kFirstWord))
    throw VocabFormatError("word vocabulary lacks reserved tokens");
  for (int i = 0; i < kFirstWord; ++i) {
    if (rows[i].token != v.words_[i])
      throw VocabFormatError("reserved token " + std::to_string(i) +
                             " must be " + v.words_[i]);
  }
  for (std::size_t i = kFirstWord; i < rows.size(); ++i) {
    if (!v.index_.emplace(rows[i].token, v.size()).second)
      throw VocabFormatError("duplicate word '" + rows[i].token + "'");
    v.words_.push_back(rows[i].token);
    v.counts_.push_back(rows[i].count);
  }
  return v;
}

TextSequence tokenize_text(std::string_view text, const WordVocab &vocab) {
  TextSequence seq;
  seq.ids.push_back(WordVocab::kCls);
  seq.words.push_back(vocab.word(WordVocab::kCls));
  for (std::string &w : split_words(text)) {
    seq.ids.push_back(vocab.lookup(w));
    seq.words.push_back(std::move(w));
  }
  seq.positions.resize(seq.ids.size());
  for (std::size_t i = 0; i < seq.positions.size(); ++i)
    seq.positions[i] = static_cast<int>(i);
  return seq;
}

MotifSequence tokenize_molecule(const MolecularGraph &graph,
                                const MotifVocab &vocab) {
  Fragmentation f = fragment(graph);
  std::vector<int> by_position(f.motifs.size());
  for (std::size_t m = 0; m < f.motifs.size(); ++m)
    by_position[f.positions[m]] = static_cast<int>(m);

  MotifSequence seq;
  seq.labels.push_back(kMolTokenLabel);
  seq.positions.push_back(0);
  for (std::size_t p = 0; p < by_position.size(); ++p) {
    Motif &m = f.motifs[by_position[p]];
    seq.labels.push_back(vocab.lookup(m.canonical_key));
    seq.positions.push_back(static_cast<int>(p) + 1);
    seq.motifs.push_back(std::move(m));
  }
  return seq;
}

}  // namespace moltext
