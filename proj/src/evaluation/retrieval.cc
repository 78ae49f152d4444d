//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>
#include <stdexcept>

#include "moltext/evaluation.h"
#include "moltext/fusion.h"

namespace moltext {

namespace {

TextSequence lone_cls() {
  TextSequence t;
  t.ids = {WordVocab::kCls};
  t.positions = {0};
  return t;
}

MotifSequence lone_mol() {
  MotifSequence m;
  m.labels = {kMolTokenLabel};
  m.positions = {0};
  return m;
}

std::vector<double> row_of(const Var &v) {
  auto r = v.value().row(0);
  return {r.begin(), r.end()};
}

}  // namespace

std::vector<double> embed_pairless(const Model &model,
                                   const MotifSequence &seq) {
  Tape tape(false);
  return row_of(encode_pair(tape, model, seq, lone_cls(), {}).motif_global);
}

std::vector<double> embed_pairless(const Model &model,
                                   const TextSequence &seq) {
  Tape tape(false);
  return row_of(encode_pair(tape, model, lone_mol(), seq, {}).text_global);
}

PairEmbeddings embed_pairs(const Model &model,
                           std::span<const EncodedExample> data) {
  const int n = static_cast<int>(data.size());
  const int d = model.config().fusion.width;
  PairEmbeddings out{Matrix(n, d), Matrix(n, d)};
  for (int i = 0; i < n; ++i) {
    const auto g = embed_pairless(model, data[i].motifs);
    const auto t = embed_pairless(model, data[i].text);
    std::copy(g.begin(), g.end(), out.graph.row(i).begin());
    std::copy(t.begin(), t.end(), out.text.row(i).begin());
  }
  return out;
}

Retrieval retrieve(std::span<const double> query, const Matrix &candidates) {
  Retrieval r;
  for (int i = 0; i < candidates.rows(); ++i) {
    r.scores.push_back(cosine_similarity(query, candidates.row(i)));
    if (r.chosen < 0 || r.scores[i] > r.scores[r.chosen])
      r.chosen = i;
  }
  return r;
}

double retrieval_accuracy(const PairEmbeddings &embeddings, int candidates,
                          RetrievalDirection direction, std::uint64_t seed) {
  const int n = embeddings.graph.rows();
  if (candidates < 2)
    throw std::invalid_argument("retrieval: T must be >= 2");
  if (n < candidates || embeddings.text.rows() != n)
    throw std::invalid_argument("retrieval: fewer pairs than candidates");
  const bool g2t = direction == RetrievalDirection::kGraphToText;
  const Matrix &queries = g2t ? embeddings.graph : embeddings.text;
  const Matrix &pool = g2t ? embeddings.text : embeddings.graph;
  std::mt19937_64 rng(seed);
  std::vector<int> others(n - 1);
  int correct = 0;
  Matrix cand(candidates, pool.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0, k = 0; j < n; ++j)
      if (j != i)
        others[k++] = j;
    for (int s = 0; s < candidates - 1; ++s) {
      std::uniform_int_distribution<int> pick(s, n - 2);
      std::swap(others[s], others[pick(rng)]);
    }
    std::uniform_int_distribution<int> slot_dist(0, candidates - 1);
    const int truth = slot_dist(rng);
    for (int s = 0, k = 0; s < candidates; ++s) {
      const int src = s == truth ? i : others[k++];
      std::copy(pool.row(src).begin(), pool.row(src).end(), cand.row(s).begin());
    }
    correct += retrieve(queries.row(i), cand).chosen == truth;
  }
  return static_cast<double>(correct) / n;
}

}  // namespace moltext
