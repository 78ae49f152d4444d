//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_CHECKPOINT_H_
#define MOLTEXT_CHECKPOINT_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "moltext/model.h"
#include "moltext/training.h"
#include "moltext/vocab.h"

namespace moltext {

inline constexpr std::string_view kCheckpointFormatVersion = "1";

class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RngState {
  std::uint64_t seed = 0;
  int epochs_completed = 0;
  int steps = 0;
};

struct Checkpoint {
  Model model;
  TrainConfig train_config;
  std::string motif_vocab_digest;
  std::string word_vocab_digest;
  RngState rng;
};

// Layout: "moltext-checkpoint\n", the byte length of a JSON header and a
// newline, the header (format version, configs, vocab digests, RNG state,
// tensor table), then every tensor as little-endian IEEE-754 doubles.
std::string serialize_checkpoint(const Model &model,
                                 const TrainConfig &train_config,
                                 const MotifVocab &motif_vocab,
                                 const WordVocab &word_vocab,
                                 const RngState &rng);

// Verifies the format version, the vocabulary digests and the tensor table.
// Throws CheckpointError naming the offending field or tensor.
Checkpoint parse_checkpoint(std::string_view bytes,
                            const MotifVocab &motif_vocab,
                            const WordVocab &word_vocab);

// Header only, without vocabulary verification.
nlohmann::json checkpoint_header(std::string_view bytes);

void save_checkpoint(const std::string &path, const Model &model,
                     const TrainConfig &train_config,
                     const MotifVocab &motif_vocab, const WordVocab &word_vocab,
                     const RngState &rng);
Checkpoint load_checkpoint(const std::string &path,
                           const MotifVocab &motif_vocab,
                           const WordVocab &word_vocab);

}  // namespace moltext

#endif  // MOLTEXT_CHECKPOINT_H_
