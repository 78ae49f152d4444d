//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "gradcheck.h"
#include "moltext/encoders.h"
#include "moltext/fusion.h"
#include "moltext/objectives.h"

namespace moltext {
namespace {

using testing::make_tiny_corpus;
using testing::tiny_config;

double gelu_ref(double x) {
  const double k = std::sqrt(2.0 / std::numbers::pi);
  return 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
}

Matrix dense(const Matrix &x, const Parameter &w, const Parameter &b) {
  Matrix out = matmul(x, w.value);
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c)
      out(r, c) += b.value(0, c);
  return out;
}

Matrix gelu_all(Matrix m) {
  for (double &v : m.values())
    v = gelu_ref(v);
  return m;
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

class ModelTest : public ::testing::Test {
protected:
  testing::TinyCorpus corpus = make_tiny_corpus();
  Model model{tiny_config(corpus), 7};
};

TEST_F(ModelTest, ParameterGroupsAndNames) {
  EXPECT_GE(model.find("gin.0.mlp0.weight"), 0);
  EXPECT_EQ(model.param(model.find("embed.words")).group,
            ParamGroup::kTextEncoder);
  EXPECT_EQ(model.param(model.find("embed.motif_projection.weight")).group,
            ParamGroup::kProjector);
  EXPECT_EQ(model.param(model.find("head.motif.weight")).group,
            ParamGroup::kClassifier);
  EXPECT_EQ(model.param(model.find("fusion.round1.text.cross.attn.key.weight"))
                .group,
            ParamGroup::kFusion);
  EXPECT_EQ(model.find("nope"), -1);

  ModelConfig no_cross = model.config();
  no_cross.fusion.cross_attention = false;
  Model m2(no_cross, 7);
  EXPECT_EQ(m2.find("fusion.round0.motif.cross.attn.query.weight"), -1);

  ModelConfig bad = model.config();
  bad.fusion.heads = 3;
  EXPECT_THROW(Model(bad, 1), std::invalid_argument);
  bad = model.config();
  bad.fusion.text_layers = {1};
  EXPECT_THROW(Model(bad, 1), std::invalid_argument);
}

TEST_F(ModelTest, ConfigJsonRoundTrip) {
  nlohmann::json j = model.config();
  ModelConfig back;
  from_json(j, back);
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_THROW(from_json(nlohmann::json{{"fusoin", {}}}, back),
               std::invalid_argument);
}

TEST_F(ModelTest, GinIsolatedAtomIsMlpStack) {
  MolecularGraph g = parse_smiles("C");
  Tape tape(false);
  Matrix got = gin_encode(tape, model, g).value();

  Matrix h = g.features();
  const auto &layers = model.layout().gin;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    h = dense(gelu_all(dense(h, model.param(layers[l].first.weight),
                             model.param(layers[l].first.bias))),
              model.param(layers[l].second.weight),
              model.param(layers[l].second.bias));
    if (l + 1 < layers.size())
      h = gelu_all(h);
  }
  ASSERT_EQ(got.rows(), 1);
  EXPECT_LT(max_abs_diff(got, h), 1e-12);
}

TEST_F(ModelTest, GinIsPermutationEquivariantAndReadoutInvariant) {
  MolecularGraph g = parse_smiles("OC(=O)c1ccncc1");
  Tape tape(false);
  Matrix base = gin_encode(tape, model, g).value();
  Matrix pooled = readout(gin_encode(tape, model, g)).value();
  std::mt19937_64 rng(1);
  std::vector<int> perm(g.atom_count());
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    MolecularGraph pg = g.permuted(perm);
    Tape t(false);
    Var atoms = gin_encode(t, model, pg);
    for (int i = 0; i < g.atom_count(); ++i)
      for (int c = 0; c < base.cols(); ++c)
        ASSERT_NEAR(atoms.value()(perm[i], c), base(i, c), 1e-9);
    EXPECT_LT(max_abs_diff(readout(atoms).value(), pooled), 1e-9);
  }
}

TEST_F(ModelTest, GinGradientMatchesFiniteDifferences) {
  MolecularGraph g = parse_smiles("CCO");
  std::vector<Parameter *> params;
  for (const GinLayerIds &l : model.layout().gin)
    for (int id : {l.first.weight, l.first.bias, l.second.weight, l.second.bias})
      params.push_back(&model.param(id));
  auto r = testing::check_gradients(
      params,
      [&](Tape &t) { return ops::sum(ops::gelu(gin_encode(t, model, g))); },
      0.3, 5);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST_F(ModelTest, GinRejectsWidthMismatch) {
  ModelConfig cfg = model.config();
  cfg.graph.input_width = 5;
  Model other(cfg, 1);
  Tape tape(false);
  EXPECT_THROW(gin_encode(tape, other, parse_smiles("CC")),
               std::invalid_argument);
}

TEST(ReadoutTest, MeanOfRows) {
  Tape tape;
  Matrix r = readout(tape.constant(Matrix::from_rows({{1, 3}, {3, 1}}))).value();
  EXPECT_EQ(r, Matrix::from_rows({{2, 2}}));
  Matrix s = readout(tape.constant(Matrix::from_rows({{3, 1}, {1, 3}}))).value();
  EXPECT_EQ(r, s);
  EXPECT_EQ(readout(tape.constant(Matrix::from_rows({{4, 5}}))).value(),
            Matrix::from_rows({{4, 5}}));
  EXPECT_THROW(readout(tape.constant(Matrix(0, 2))), std::invalid_argument);
}

TEST_F(ModelTest, MotifSequenceEmbedding) {
  const int d = model.config().fusion.width;
  const Parameter &special = model.param(model.layout().motif_special);
  const Parameter &pos = model.param(model.layout().motif_positions);
  Tape tape(false);

  MotifSequence empty;
  empty.labels = {kMolTokenLabel};
  empty.positions = {0};
  Matrix e = embed_motif_sequence(tape, model, empty).value();
  ASSERT_EQ(e.rows(), 1);
  for (int c = 0; c < d; ++c)
    EXPECT_EQ(e(0, c), special.value(0, c) + pos.value(0, c));

  // Two copies of one motif at positions 1 and 2.
  MotifSequence two = corpus.motifs[0];
  ASSERT_EQ(two.length(), 3);
  two.motifs[1] = two.motifs[0];
  two.labels[2] = two.labels[1];
  Matrix t = embed_motif_sequence(tape, model, two).value();
  ASSERT_EQ(t.rows(), 3);
  ASSERT_EQ(t.cols(), d);
  for (int c = 0; c < d; ++c)
    EXPECT_NEAR(t(2, c) - t(1, c), pos.value(2, c) - pos.value(1, c), 1e-15);

  const int masked[] = {1};
  Matrix m = embed_motif_sequence(tape, model, two, masked).value();
  for (int c = 0; c < d; ++c)
    EXPECT_EQ(m(1, c), special.value(1, c) + pos.value(1, c));
  const int global[] = {0};
  EXPECT_THROW(embed_motif_sequence(tape, model, two, global), std::out_of_range);

  two.positions[2] = model.config().max_positions;
  EXPECT_THROW(embed_motif_sequence(tape, model, two), std::out_of_range);
}

TEST_F(ModelTest, EqualMotifsEmbedIdenticallyAcrossMolecules) {
  // The benzene of two different molecules maps to one row.
  Tape tape(false);
  MotifEmbeddingCache c1(tape);
  const std::string key = canonical_key(parse_smiles("c1ccccc1"));
  Matrix a = c1.get(model, key).value();
  Tape tape2(false);
  MotifEmbeddingCache c2(tape2);
  EXPECT_EQ(a, c2.get(model, key).value());
}

TEST_F(ModelTest, TextSequenceEmbedding) {
  const int d = model.config().fusion.width;
  const Parameter &words = model.param(model.layout().word_table);
  const Parameter &pos = model.param(model.layout().text_positions);
  Tape tape(false);
  TextSequence cls = tokenize_text("", corpus.word_vocab);
  Matrix c = embed_text_sequence(tape, model, cls).value();
  ASSERT_EQ(c.rows(), 1);
  ASSERT_EQ(c.cols(), d);

  TextSequence s = tokenize_text("ring ring", corpus.word_vocab);
  Matrix e = embed_text_sequence(tape, model, s).value();
  for (int k = 0; k < d; ++k)
    EXPECT_NEAR(e(2, k) - e(1, k), pos.value(2, k) - pos.value(1, k), 1e-15);
  const int masked[] = {2};
  Matrix m = embed_text_sequence(tape, model, s, masked).value();
  for (int k = 0; k < d; ++k)
    EXPECT_EQ(m(2, k), words.value(WordVocab::kMask, k) + pos.value(2, k));

  s.ids[1] = corpus.word_vocab.size();
  EXPECT_THROW(embed_text_sequence(tape, model, s), std::out_of_range);
}

TEST_F(ModelTest, EmbeddingGradientsMatchFiniteDifferences) {
  std::vector<Parameter *> params;
  for (auto &p : model.parameters())
    if (p.name.starts_with("embed.") || p.name.starts_with("gin."))
      params.push_back(&p);
  const int masked[] = {2};
  auto r = testing::check_gradients(
      params,
      [&](Tape &t) {
        Var m = embed_motif_sequence(t, model, corpus.motifs[2], masked);
        Var w = embed_text_sequence(t, model, corpus.text[2], masked);
        return ops::add(ops::squared_norm(ops::gelu(m)),
                        ops::sum(ops::gelu(w)));
      },
      0.05, 3, 1e-5, 2);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst;
}

TEST_F(ModelTest, SelfAttentionBlockBasics) {
  Tape tape(false);
  std::mt19937_64 rng(2);
  const int d = model.config().fusion.width;
  Var x = tape.constant(testing::random_parameter("x", 5, d, rng).value);
  EXPECT_EQ(self_attention_stack(tape, model, {}, x).value(), x.value());
  const BlockIds &b = model.layout().rounds[0].text_blocks[0];
  Var y = self_attention_block(tape, model, b, x);
  EXPECT_EQ(y.rows(), 5);
  EXPECT_EQ(y.cols(), d);

  // One token: attention returns the value path of that token.
  Var one = ops::slice_rows(x, 0, 1);
  Var n = layer_norm(tape, model, b.attn_norm, one);
  Var via_attn = attend(tape, model, b.attn, model.config().fusion.heads, n, n);
  Var value_path = linear(tape, model, b.attn.output,
                          linear(tape, model, b.attn.value, n));
  EXPECT_LT(max_abs_diff(via_attn.value(), value_path.value()), 1e-14);
}

TEST_F(ModelTest, CrossAttendShapeAndEmptyContext) {
  Tape tape(false);
  std::mt19937_64 rng(4);
  const int d = model.config().fusion.width;
  Var q = tape.constant(testing::random_parameter("q", 5, d, rng).value);
  Var kv = tape.constant(testing::random_parameter("kv", 8, d, rng).value);
  const CrossIds &c = model.layout().rounds[0].motif_cross;
  Var out = cross_attend(tape, model, c, q, kv);
  EXPECT_EQ(out.rows(), 5);
  EXPECT_EQ(out.cols(), d);
  EXPECT_THROW(cross_attend(tape, model, c, q, tape.constant(Matrix(0, d))),
               std::invalid_argument);
}

TEST_F(ModelTest, CrossAttendWithIdentityProjectionsCopiesSingleValue) {
  Model m = model;
  const CrossIds &c = m.layout().rounds[0].motif_cross;
  const int d = m.config().fusion.width;
  for (const LinearIds *l : {&c.attn.query, &c.attn.key, &c.attn.value,
                             &c.attn.output}) {
    Matrix eye(d, d);
    for (int i = 0; i < d; ++i)
      eye(i, i) = 1;
    m.param(l->weight).value = eye;
    m.param(l->bias).value.fill(0);
  }
  Tape tape(false);
  std::mt19937_64 rng(5);
  Var q = tape.constant(testing::random_parameter("q", 3, d, rng).value);
  Var kv = tape.constant(testing::random_parameter("kv", 1, d, rng).value);
  Var qn = layer_norm(tape, m, c.query_norm, q);
  Var cn = layer_norm(tape, m, c.context_norm, kv);
  Matrix a = attend(tape, m, c.attn, m.config().fusion.heads, qn, cn).value();
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < d; ++k)
      EXPECT_NEAR(a(r, k), cn.value()(0, k), 1e-14);
}

TEST_F(ModelTest, EncodePairShapesAndDeterminism) {
  Tape t1(false), t2(false);
  FusionOutput a = encode_pair(t1, model, corpus.motifs[3], corpus.text[3], {});
  FusionOutput b = encode_pair(t2, model, corpus.motifs[3], corpus.text[3], {});
  EXPECT_EQ(a.h_motif.rows(), corpus.motifs[3].length());
  EXPECT_EQ(a.h_text.rows(), corpus.text[3].length());
  EXPECT_EQ(a.z_motif.rows(), corpus.motifs[3].length());
  EXPECT_EQ(a.z_motif_rounds.size(), 2u);
  EXPECT_EQ(a.h_motif.value(), b.h_motif.value());
  EXPECT_EQ(a.h_text.value(), b.h_text.value());
  EXPECT_EQ(a.motif_global.value(), b.motif_global.value());
  // First-round globals by default.
  EXPECT_EQ(a.motif_global.value(),
            ops::slice_rows(a.z_motif_rounds[0], 0, 1).value());
}

TEST_F(ModelTest, ZeroCrossOutputGivesResidualIdentity) {
  ModelConfig cfg = model.config();
  cfg.fusion.rounds = 1;
  cfg.fusion.motif_layers = {1};
  cfg.fusion.text_layers = {1};
  Model m(cfg, 3);
  for (const CrossIds *c : {&m.layout().rounds[0].motif_cross,
                            &m.layout().rounds[0].text_cross}) {
    m.param(c->attn.output.weight).value.fill(0);
    m.param(c->attn.output.bias).value.fill(0);
  }
  Tape tape(false);
  FusionOutput out = encode_pair(tape, m, corpus.motifs[1], corpus.text[1], {});
  EXPECT_EQ(out.h_motif.value(), out.z_motif.value());
  EXPECT_EQ(out.h_text.value(), out.z_text.value());
}

TEST_F(ModelTest, WithoutCrossAttentionHEqualsZ) {
  ModelConfig cfg = model.config();
  cfg.fusion.cross_attention = false;
  Model m(cfg, 3);
  Tape tape(false);
  FusionOutput out = encode_pair(tape, m, corpus.motifs[2], corpus.text[2], {});
  EXPECT_EQ(out.h_motif.value(), out.z_motif.value());
  EXPECT_EQ(out.h_text.value(), out.z_text.value());
}

TEST_F(ModelTest, PermutingMotifSlotsWithPositionsPermutesOutputs) {
  const MotifSequence &base = corpus.motifs[3];
  ASSERT_GE(base.length(), 3);
  Tape tape(false);
  FusionOutput a = encode_pair(tape, model, base, corpus.text[3], {});
  MotifSequence rev = base;
  std::vector<int> order(base.length() - 1);
  std::iota(order.begin(), order.end(), 1);
  std::reverse(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rev.labels[i + 1] = base.labels[order[i]];
    rev.positions[i + 1] = base.positions[order[i]];
    rev.motifs[i] = base.motifs[order[i] - 1];
  }
  FusionOutput b = encode_pair(tape, model, rev, corpus.text[3], {});
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c = 0; c < a.h_motif.cols(); ++c)
      EXPECT_NEAR(b.h_motif.value()(i + 1, c), a.h_motif.value()(order[i], c),
                  1e-12);
  EXPECT_LT(max_abs_diff(a.h_text.value(), b.h_text.value()), 1e-12);
}

TEST_F(ModelTest, EveryParameterReceivesGradient) {
  std::vector<PairInput> batch;
  for (std::size_t i = 0; i < corpus.motifs.size(); ++i) {
    MaskSpec mask = sample_masks(corpus.motifs[i], corpus.text[i],
                                 corpus.motif_vocab, {0.5, 0.3}, 11 + i);
    batch.push_back({&corpus.motifs[i], &corpus.text[i], mask});
  }
  Tape tape;
  TotalLoss loss = total_loss(tape, model, batch, corpus.motif_vocab, {});
  ASSERT_GT(loss.report.motif_masked, 0);
  tape.backward(loss.loss);
  for (const Parameter &p : model.parameters()) {
    const Matrix *g = tape.gradient(p);
    ASSERT_NE(g, nullptr) << p.name;
    double norm = 0;
    for (double v : g->values())
      norm += v * v;
    EXPECT_GT(norm, 0.0) << p.name;
  }
}

TEST_F(ModelTest, MaskedMotifLogitsDependOnText) {
  MaskSpec mask;
  mask.motif.push_back({1, corpus.motifs[0].labels[1]});
  Tape tape(false);
  FusionOutput a = encode_pair(tape, model, corpus.motifs[0], corpus.text[0], mask);
  FusionOutput b = encode_pair(tape, model, corpus.motifs[0], corpus.text[4], mask);
  const int slot[] = {1};
  Matrix la = motif_logits(tape, model, a.h_motif, slot).value();
  Matrix lb = motif_logits(tape, model, b.h_motif, slot).value();
  EXPECT_GT(max_abs_diff(la, lb), 1e-6);
}

}  // namespace
}  // namespace moltext
