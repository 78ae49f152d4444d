//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/model.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "moltext/json_util.h"

namespace moltext {

void ModelConfig::validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok)
      throw std::invalid_argument(std::string("model config: ") + what);
  };
  require(graph.input_width > 0, "graph.input_width must be positive");
  require(graph.layers >= 1, "graph.layers must be >= 1");
  require(graph.width > 0, "graph.width must be positive");
  require(fusion.rounds >= 1, "fusion.rounds must be >= 1");
  require(static_cast<int>(fusion.motif_layers.size()) == fusion.rounds &&
              static_cast<int>(fusion.text_layers.size()) == fusion.rounds,
          "fusion layer lists must have one entry per round");
  for (int n : fusion.motif_layers)
    require(n >= 0, "fusion.motif_layers entries must be >= 0");
  for (int n : fusion.text_layers)
    require(n >= 0, "fusion.text_layers entries must be >= 0");
  require(fusion.heads >= 1, "fusion.heads must be >= 1");
  require(fusion.width > 0 && fusion.width % fusion.heads == 0,
          "fusion.width must be a positive multiple of fusion.heads");
  require(fusion.ff_width > 0, "fusion.ff_width must be positive");
  require(max_positions >= 1, "max_positions must be >= 1");
  require(word_vocab_size >= 4, "word_vocab_size must cover reserved ids");
  require(motif_classes >= 0, "motif_classes must be >= 0");
}

void to_json(nlohmann::json &j, const ModelConfig &c) {
  j = nlohmann::json{
      {"graph",
       {{"input_width", c.graph.input_width},
        {"layers", c.graph.layers},
        {"width", c.graph.width}}},
      {"fusion",
       {{"rounds", c.fusion.rounds},
        {"motif_layers", c.fusion.motif_layers},
        {"text_layers", c.fusion.text_layers},
        {"heads", c.fusion.heads},
        {"width", c.fusion.width},
        {"ff_width", c.fusion.ff_width},
        {"cross_attention", c.fusion.cross_attention},
        {"contrastive_round",
         c.fusion.contrastive_round == ContrastiveRound::kFirst ? "first"
                                                                 : "final"}}},
      {"max_positions", c.max_positions},
      {"word_vocab_size", c.word_vocab_size},
      {"motif_classes", c.motif_classes},
  };
}

void from_json(const nlohmann::json &j, ModelConfig &c) {
  check_keys(j, "model",
             {"graph", "fusion", "max_positions", "word_vocab_size",
              "motif_classes"});
  if (j.contains("graph")) {
    const auto &g = j.at("graph");
    check_keys(g, "model.graph", {"input_width", "layers", "width"});
    read_field(g, "input_width", c.graph.input_width);
    read_field(g, "layers", c.graph.layers);
    read_field(g, "width", c.graph.width);
  }
  if (j.contains("fusion")) {
    const auto &f = j.at("fusion");
    check_keys(f, "model.fusion",
               {"rounds", "motif_layers", "text_layers", "heads", "width",
                "ff_width", "cross_attention", "contrastive_round"});
    read_field(f, "rounds", c.fusion.rounds);
    read_field(f, "motif_layers", c.fusion.motif_layers);
    read_field(f, "text_layers", c.fusion.text_layers);
    read_field(f, "heads", c.fusion.heads);
    read_field(f, "width", c.fusion.width);
    read_field(f, "ff_width", c.fusion.ff_width);
    read_field(f, "cross_attention", c.fusion.cross_attention);
    if (f.contains("contrastive_round")) {
      const std::string r = f.at("contrastive_round").get<std::string>();
      if (r == "first")
        c.fusion.contrastive_round = ContrastiveRound::kFirst;
      else if (r == "final")
        c.fusion.contrastive_round = ContrastiveRound::kFinal;
      else
        throw std::invalid_argument(
            "model.fusion.contrastive_round must be \"first\" or \"final\"");
    }
  }
  read_field(j, "max_positions", c.max_positions);
  read_field(j, "word_vocab_size", c.word_vocab_size);
  read_field(j, "motif_classes", c.motif_classes);
}

namespace {

class Init {
public:
  explicit Init(std::uint64_t seed) : rng_(seed) {}

  Matrix normal(int rows, int cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (double &v : m.values())
      v = dist(rng_);
    return m;
  }

private:
  std::mt19937_64 rng_;
};

constexpr double kEmbeddingStd = 0.2;

}  // namespace

int Model::add(std::string name, ParamGroup group, Matrix value) {
  const int id = static_cast<int>(params_.size());
  if (!index_.emplace(name, id).second)
    throw std::logic_error("duplicate parameter " + name);
  params_.push_back(Parameter{std::move(name), group, std::move(value)});
  return id;
}

int Model::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

std::size_t Model::scalar_count() const {
  std::size_t n = 0;
  for (const Parameter &p : params_)
    n += p.value.size();
  return n;
}

Model::Model(const ModelConfig &config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Init init(seed);
  const int d = config_.fusion.width;
  const int dg = config_.graph.width;

  auto make_linear = [&](const std::string &name, ParamGroup group, int in,
                         int out) {
    LinearIds ids;
    ids.weight = add(name + ".weight", group,
                     init.normal(in, out, 1.0 / std::sqrt(double(in))));
    ids.bias = add(name + ".bias", group, Matrix(1, out));
    return ids;
  };
  auto make_norm = [&](const std::string &name, ParamGroup group, int width) {
    NormIds ids;
    ids.gain = add(name + ".gain", group, Matrix(1, width, 1.0));
    ids.shift = add(name + ".shift", group, Matrix(1, width));
    return ids;
  };
  auto make_attention = [&](const std::string &name) {
    AttentionIds ids;
    ids.query = make_linear(name + ".query", ParamGroup::kFusion, d, d);
    ids.key = make_linear(name + ".key", ParamGroup::kFusion, d, d);
    ids.value = make_linear(name + ".value", ParamGroup::kFusion, d, d);
    ids.output = make_linear(name + ".output", ParamGroup::kFusion, d, d);
    return ids;
  };
  auto make_block = [&](const std::string &name) {
    BlockIds ids;
    ids.attn_norm = make_norm(name + ".attn_norm", ParamGroup::kFusion, d);
    ids.attn = make_attention(name + ".attn");
    ids.ff_norm = make_norm(name + ".ff_norm", ParamGroup::kFusion, d);
    ids.ff_in = make_linear(name + ".ff_in", ParamGroup::kFusion, d,
                            config_.fusion.ff_width);
    ids.ff_out = make_linear(name + ".ff_out", ParamGroup::kFusion,
                             config_.fusion.ff_width, d);
    return ids;
  };
  auto make_cross = [&](const std::string &name) {
    CrossIds ids;
    ids.query_norm = make_norm(name + ".query_norm", ParamGroup::kFusion, d);
    ids.context_norm =
        make_norm(name + ".context_norm", ParamGroup::kFusion, d);
    ids.attn = make_attention(name + ".attn");
    return ids;
  };

  int in = config_.graph.input_width;
  for (int l = 0; l < config_.graph.layers; ++l) {
    const std::string name = "gin." + std::to_string(l);
    GinLayerIds ids;
    ids.first = make_linear(name + ".mlp0", ParamGroup::kGraphEncoder, in, dg);
    ids.second = make_linear(name + ".mlp1", ParamGroup::kGraphEncoder, dg, dg);
    layout_.gin.push_back(ids);
    in = dg;
  }
  layout_.motif_projection =
      make_linear("embed.motif_projection", ParamGroup::kProjector, dg, d);
  layout_.motif_special = add("embed.motif_special", ParamGroup::kGraphEncoder,
                              init.normal(2, d, kEmbeddingStd));
  layout_.motif_positions =
      add("embed.motif_positions", ParamGroup::kGraphEncoder,
          init.normal(config_.max_positions, d, kEmbeddingStd));
  layout_.word_table =
      add("embed.words", ParamGroup::kTextEncoder,
          init.normal(config_.word_vocab_size, d, kEmbeddingStd));
  layout_.text_positions =
      add("embed.text_positions", ParamGroup::kTextEncoder,
          init.normal(config_.max_positions, d, kEmbeddingStd));

  for (int r = 0; r < config_.fusion.rounds; ++r) {
    const std::string name = "fusion.round" + std::to_string(r);
    RoundIds round;
    for (int l = 0; l < config_.fusion.motif_layers[r]; ++l)
      round.motif_blocks.push_back(
          make_block(name + ".motif.block" + std::to_string(l)));
    for (int l = 0; l < config_.fusion.text_layers[r]; ++l)
      round.text_blocks.push_back(
          make_block(name + ".text.block" + std::to_string(l)));
    if (config_.fusion.cross_attention) {
      round.motif_cross = make_cross(name + ".motif.cross");
      round.text_cross = make_cross(name + ".text.cross");
    }
    layout_.rounds.push_back(std::move(round));
  }

  if (config_.motif_classes > 0) {
    layout_.motif_head_norm =
        make_norm("head.motif.norm", ParamGroup::kClassifier, d);
    layout_.motif_head = make_linear("head.motif", ParamGroup::kClassifier, d,
                                     config_.motif_classes);
  }
  layout_.word_head_norm =
      make_norm("head.word.norm", ParamGroup::kClassifier, d);
  layout_.word_head = make_linear("head.word", ParamGroup::kClassifier, d,
                                  config_.word_vocab_size);
}

Var linear(Tape &tape, const Model &model, const LinearIds &ids, Var x) {
  return ops::add_row(ops::matmul(x, model.var(tape, ids.weight)),
                      model.var(tape, ids.bias));
}

Var layer_norm(Tape &tape, const Model &model, const NormIds &ids, Var x) {
  return ops::layer_norm(x, model.var(tape, ids.gain),
                         model.var(tape, ids.shift));
}

}  // namespace moltext
