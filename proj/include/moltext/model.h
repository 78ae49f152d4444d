//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_MODEL_H_
#define MOLTEXT_MODEL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "moltext/autograd.h"
#include "moltext/molgraph.h"

namespace moltext {

struct GraphEncoderConfig {
  int input_width = kAtomFeatureWidth;
  int layers = 3;
  int width = 64;
};

// Which round's self-attention output feeds the contrastive loss and the
// pairless embeddings.
enum class ContrastiveRound { kFirst, kFinal };

struct FusionConfig {
  int rounds = 2;
  std::vector<int> motif_layers = {1, 1};
  std::vector<int> text_layers = {2, 2};
  int heads = 4;
  int width = 128;
  int ff_width = 256;
  bool cross_attention = true;
  ContrastiveRound contrastive_round = ContrastiveRound::kFirst;

  int key_width() const { return width / heads; }
};

struct ModelConfig {
  GraphEncoderConfig graph;
  FusionConfig fusion;
  int max_positions = 64;
  // Filled from the vocabularies.
  int word_vocab_size = 0;
  int motif_classes = 0;

  // Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

void to_json(nlohmann::json &j, const ModelConfig &c);
void from_json(const nlohmann::json &j, ModelConfig &c);

struct LinearIds {
  int weight = -1;  // in x out
  int bias = -1;    // 1 x out
};

struct NormIds {
  int gain = -1;
  int shift = -1;
};

struct AttentionIds {
  LinearIds query, key, value, output;
};

struct BlockIds {
  NormIds attn_norm;
  AttentionIds attn;
  NormIds ff_norm;
  LinearIds ff_in, ff_out;
};

struct CrossIds {
  NormIds query_norm, context_norm;
  AttentionIds attn;
};

struct RoundIds {
  std::vector<BlockIds> motif_blocks, text_blocks;
  // Unset (-1) when cross-attention is disabled.
  CrossIds motif_cross, text_cross;
};

struct GinLayerIds {
  LinearIds first, second;
};

struct ModelLayout {
  std::vector<GinLayerIds> gin;
  LinearIds motif_projection;
  int motif_special = -1;  // rows: <MOL>, motif <MASK>
  int motif_positions = -1;
  int word_table = -1;     // reserved rows include <CLS> and word <MASK>
  int text_positions = -1;
  std::vector<RoundIds> rounds;
  NormIds motif_head_norm, word_head_norm;
  LinearIds motif_head, word_head;
};

inline constexpr int kMolSpecialRow = 0;
inline constexpr int kMotifMaskSpecialRow = 1;

// All learnable tensors plus their layout. Tapes refer to parameters by
// address, so a model must not be moved or copied over while a tape built
// from it is alive.
class Model {
public:
  Model(const ModelConfig &config, std::uint64_t seed);

  const ModelConfig &config() const { return config_; }
  const ModelLayout &layout() const { return layout_; }

  std::vector<Parameter> &parameters() { return params_; }
  const std::vector<Parameter> &parameters() const { return params_; }
  const Parameter &param(int id) const { return params_.at(id); }
  Parameter &param(int id) { return params_.at(id); }
  // -1 when absent.
  int find(std::string_view name) const;
  std::size_t scalar_count() const;

  Var var(Tape &tape, int id) const { return tape.param(params_.at(id)); }

private:
  int add(std::string name, ParamGroup group, Matrix value);

  ModelConfig config_;
  ModelLayout layout_;
  std::vector<Parameter> params_;
  std::unordered_map<std::string, int> index_;
};

// x W + b
Var linear(Tape &tape, const Model &model, const LinearIds &ids, Var x);
Var layer_norm(Tape &tape, const Model &model, const NormIds &ids, Var x);

}  // namespace moltext

#endif  // MOLTEXT_MODEL_H_
