//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_VOCAB_H_
#define MOLTEXT_VOCAB_H_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "moltext/molgraph.h"

namespace moltext {

inline constexpr int kVocabFormatVersion = 1;

// Labels of the two non-vocabulary motif slots.
inline constexpr int kMolTokenLabel = -1;
inline constexpr int kUnknownMotifLabel = -2;

class VocabFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MotifEntry {
  std::string key;
  std::int64_t count = 0;
  bool maskable = false;
};

// Motif label space. Ids are dense and ordered by descending count, then
// ascending canonical key.
class MotifVocab {
public:
  MotifVocab() = default;
  static MotifVocab from_counts(const std::map<std::string, std::int64_t> &counts);

  int size() const { return static_cast<int>(entries_.size()); }
  const MotifEntry &entry(int id) const { return entries_.at(id); }
  // kUnknownMotifLabel when absent.
  int lookup(std::string_view key) const;

  void set_maskable(const std::set<int> &ids);
  bool is_maskable(int id) const { return id >= 0 && id < size() && entries_[id].maskable; }
  int maskable_count() const { return static_cast<int>(maskable_ids_.size()); }
  // Dense index into the maskable subset (classifier output), or -1.
  int maskable_index(int id) const;
  int label_of_maskable_index(int index) const { return maskable_ids_.at(index); }

  std::string serialize() const;
  static MotifVocab parse(std::string_view text);

private:
  std::vector<MotifEntry> entries_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> maskable_ids_;
  std::vector<int> maskable_index_;
};

struct VocabBuildReport {
  int molecules = 0;
  int skipped = 0;
  // First few parse failures, "index: message".
  std::vector<std::string> errors;
};

struct MotifVocabBuild {
  MotifVocab vocab;
  VocabBuildReport report;
};

// Fragments every molecule and counts canonical keys. Unparseable entries are
// skipped and reported. Throws std::invalid_argument on an empty corpus.
MotifVocabBuild build_motif_vocab(std::span<const std::string> smiles);

inline constexpr std::int64_t kUnboundedCount =
    std::numeric_limits<std::int64_t>::max();

// {id : min_count <= count <= max_count}
std::set<int> build_masking_set(const MotifVocab &vocab, std::int64_t min_count,
                                std::int64_t max_count);

// Lowercased runs of ASCII letters/digits (bytes >= 0x80 count as letters).
std::vector<std::string> split_words(std::string_view text);

class WordVocab {
public:
  static constexpr int kPad = 0;
  static constexpr int kCls = 1;
  static constexpr int kMask = 2;
  static constexpr int kUnk = 3;
  static constexpr int kFirstWord = 4;

  WordVocab();
  // Words seen at least `min_frequency` times; ids by descending count then
  // ascending word.
  static WordVocab build(std::span<const std::string> texts,
                         int min_frequency = 2);

  int size() const { return static_cast<int>(words_.size()); }
  int lookup(std::string_view word) const;
  const std::string &word(int id) const { return words_.at(id); }
  std::int64_t count(int id) const { return counts_.at(id); }
  static bool is_reserved(int id) { return id >= 0 && id < kFirstWord; }

  std::string serialize() const;
  static WordVocab parse(std::string_view text);

private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

struct MotifSequence {
  // Slot 0 is the global <MOL> token.
  std::vector<int> labels;
  std::vector<int> positions;
  // motifs[i - 1] backs slot i.
  std::vector<Motif> motifs;

  int length() const { return static_cast<int>(labels.size()); }
};

struct TextSequence {
  // Slot 0 is <CLS>.
  std::vector<int> ids;
  std::vector<int> positions;
  std::vector<std::string> words;

  int length() const { return static_cast<int>(ids.size()); }
};

TextSequence tokenize_text(std::string_view text, const WordVocab &vocab);

// Motif slots are ordered by breadth-first position; slot i has position i.
MotifSequence tokenize_molecule(const MolecularGraph &graph,
                                const MotifVocab &vocab);

}  // namespace moltext

#endif  // MOLTEXT_VOCAB_H_
