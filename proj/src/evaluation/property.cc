//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "moltext/evaluation.h"
#include "moltext/fusion.h"
#include "moltext/optimizer.h"

namespace moltext {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]])
      ++j;
    const double rank = (i + 1 + j) / 2.0;  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0 && labels[order[k]] != 1)
        throw std::invalid_argument("roc_auc: labels must be 0 or 1");
      if (labels[order[k]] == 1) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("roc_auc: single-class labels");
  const double u = positive_rank_sum - positives * (positives + 1) / 2.0;
  return u / (static_cast<double>(positives) * negatives);
}

namespace {

// Two-class softmax head; the score is the logit difference.
std::vector<Parameter> head_parameters(int width) {
  return {{"property.weight", ParamGroup::kClassifier, Matrix(width, 2)},
          {"property.bias", ParamGroup::kClassifier, Matrix(1, 2)}};
}

TextSequence lone_cls() {
  TextSequence t;
  t.ids = {WordVocab::kCls};
  t.positions = {0};
  return t;
}

}  // namespace

PropertyResult property_finetune(std::span<const MotifSequence> molecules,
                                 std::span<const int> labels,
                                 const Model &model,
                                 const PropertyConfig &config) {
  const int n = static_cast<int>(molecules.size());
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("property: label count mismatch");
  if (n < 20)
    throw std::invalid_argument("property: at least 20 examples required");
  for (int y : labels)
    if (y != 0 && y != 1)
      throw std::invalid_argument("property: labels must be 0 or 1");
  if (!(config.test_fraction > 0 && config.test_fraction < 1))
    throw std::invalid_argument("property: test_fraction must lie in (0, 1)");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_test = std::clamp(
      static_cast<int>(std::lround(config.test_fraction * n)), 1, n - 1);
  std::vector<int> test(order.begin(), order.begin() + n_test);
  std::vector<int> train(order.begin() + n_test, order.end());
  auto both_classes = [&](const std::vector<int> &idx) {
    bool pos = false, neg = false;
    for (int i : idx)
      (labels[i] == 1 ? pos : neg) = true;
    return pos && neg;
  };
  if (!both_classes(train) || !both_classes(test))
    throw std::invalid_argument("property: single-class split");

  const int d = model.config().fusion.width;
  AdamConfig head_cfg;
  head_cfg.learning_rates.fill(config.head_learning_rate);
  std::vector<Parameter> head_params;
  std::vector<int> train_labels;
  for (int i : train)
    train_labels.push_back(labels[i]);
  std::vector<double> scores;

  if (!config.finetune) {
    // Frozen backbone: standardized features, full-batch logistic regression.
    Matrix x(n, d);
    for (int i = 0; i < n; ++i) {
      auto e = embed_pairless(model, molecules[i]);
      std::copy(e.begin(), e.end(), x.row(i).begin());
    }
    for (int c = 0; c < d; ++c) {
      double mean = 0, var = 0;
      for (int i : train)
        mean += x(i, c);
      mean /= train.size();
      for (int i : train)
        var += (x(i, c) - mean) * (x(i, c) - mean);
      const double sd = std::sqrt(var / train.size()) + 1e-12;
      for (int i = 0; i < n; ++i)
        x(i, c) = (x(i, c) - mean) / sd;
    }
    Matrix xtrain(static_cast<int>(train.size()), d);
    for (std::size_t r = 0; r < train.size(); ++r)
      std::copy(x.row(train[r]).begin(), x.row(train[r]).end(),
                xtrain.row(static_cast<int>(r)).begin());
    std::vector<Parameter> params = head_parameters(d);
    Adam adam(params, head_cfg);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      Tape tape;
      Var logits = ops::add_row(
          ops::matmul(tape.constant(xtrain), tape.param(params[0])),
          tape.param(params[1]));
      Var loss = ops::scale(ops::cross_entropy_sum(logits, train_labels),
                            1.0 / train.size());
      tape.backward(loss);
      adam.step(params, tape);
    }
    for (int i : test) {
      double s = params[1].value(0, 1) - params[1].value(0, 0);
      for (int c = 0; c < d; ++c)
        s += x(i, c) * (params[0].value(c, 1) - params[0].value(c, 0));
      scores.push_back(s);
    }
  } else {
    Model backbone = model;
    AdamConfig bb_cfg;
    bb_cfg.learning_rates.fill(config.backbone_learning_rate);
    Adam bb_adam(backbone.parameters(), bb_cfg);
    std::vector<Parameter> params = head_parameters(d);
    Adam head_adam(params, head_cfg);
    const TextSequence cls = lone_cls();
    std::vector<int> batch_order = train;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(batch_order.begin(), batch_order.end(), rng);
      for (std::size_t start = 0; start < batch_order.size();
           start += config.batch_size) {
        const std::size_t end =
            std::min(batch_order.size(), start + config.batch_size);
        Tape tape;
        MotifEmbeddingCache cache(tape);
        std::vector<Var> rows;
        std::vector<int> y;
        for (std::size_t k = start; k < end; ++k) {
          const int i = batch_order[k];
          rows.push_back(encode_pair(tape, backbone, molecules[i], cls, {}, &cache)
                             .motif_global);
          y.push_back(labels[i]);
        }
        Var logits = ops::add_row(
            ops::matmul(ops::concat_rows(rows), tape.param(params[0])),
            tape.param(params[1]));
        Var loss = ops::scale(ops::cross_entropy_sum(logits, y),
                              1.0 / static_cast<double>(y.size()));
        tape.backward(loss);
        bb_adam.step(backbone.parameters(), tape);
        head_adam.step(params, tape);
      }
    }
    for (int i : test) {
      auto e = embed_pairless(backbone, molecules[i]);
      double s = params[1].value(0, 1) - params[1].value(0, 0);
      for (int c = 0; c < d; ++c)
        s += e[c] * (params[0].value(c, 1) - params[0].value(c, 0));
      scores.push_back(s);
    }
  }
  std::vector<int> test_labels;
  for (int i : test)
    test_labels.push_back(labels[i]);
  return {roc_auc(scores, test_labels), static_cast<int>(train.size()),
          static_cast<int>(test.size())};
}

}  // namespace moltext
