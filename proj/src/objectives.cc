//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/objectives.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "moltext/json_util.h"

namespace moltext {

namespace {

std::vector<int> choose(std::vector<int> candidates, double rate,
                        std::mt19937_64 &rng) {
  if (rate < 0.0 || rate > 1.0 || !std::isfinite(rate))
    throw std::invalid_argument("mask rate must lie in [0, 1]");
  const int n = static_cast<int>(candidates.size());
  if (n == 0 || rate == 0.0)
    return {};
  int k = static_cast<int>(std::lround(rate * n));
  k = std::clamp(k, 1, n);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  candidates.resize(k);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::vector<int> argmax_rows(const Matrix &m) {
  std::vector<int> out(m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) -
                              row.begin());
  }
  return out;
}

}  // namespace

MaskSpec sample_masks(const MotifSequence &motifs, const TextSequence &text,
                      const MotifVocab &vocab, const MaskRates &rates,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> motif_candidates, word_candidates;
  for (int s = 1; s < motifs.length(); ++s)
    if (motifs.labels[s] >= 0 && vocab.is_maskable(motifs.labels[s]))
      motif_candidates.push_back(s);
  for (int s = 1; s < text.length(); ++s)
    if (text.ids[s] != WordVocab::kUnk && !WordVocab::is_reserved(text.ids[s]))
      word_candidates.push_back(s);

  MaskSpec spec;
  for (int s : choose(std::move(motif_candidates), rates.motif, rng))
    spec.motif.push_back({s, motifs.labels[s]});
  for (int s : choose(std::move(word_candidates), rates.word, rng))
    spec.word.push_back({s, text.ids[s]});
  return spec;
}

void to_json(nlohmann::json &j, const LossConfig &c) {
  j = nlohmann::json{{"temperature", c.temperature},
                     {"alpha", c.alpha},
                     {"beta", c.beta},
                     {"normalize_masked", c.normalize_masked}};
}

void from_json(const nlohmann::json &j, LossConfig &c) {
  check_keys(j, "loss", {"temperature", "alpha", "beta", "normalize_masked"});
  read_field(j, "temperature", c.temperature);
  read_field(j, "alpha", c.alpha);
  read_field(j, "beta", c.beta);
  read_field(j, "normalize_masked", c.normalize_masked);
  if (!(c.temperature > 0))
    throw std::invalid_argument("loss.temperature must be > 0");
  if (!(c.alpha >= 0) || !(c.beta >= 0))
    throw std::invalid_argument("loss.alpha and loss.beta must be >= 0");
}

Var contrastive_loss(Var motif_globals, Var text_globals, double temperature) {
  const int b = motif_globals.rows();
  if (b < 2)
    throw std::invalid_argument("contrastive_loss: batch size must be >= 2");
  if (text_globals.rows() != b)
    throw std::invalid_argument("contrastive_loss: batch size mismatch");
  if (!(temperature > 0))
    throw std::invalid_argument("contrastive_loss: temperature must be > 0");
  Var m = ops::l2_normalize_rows(motif_globals);
  Var t = ops::l2_normalize_rows(text_globals);
  std::vector<int> diagonal(b);
  std::iota(diagonal.begin(), diagonal.end(), 0);
  Var m2t = ops::cross_entropy_sum(
      ops::scale(ops::matmul_nt(m, t), 1.0 / temperature), diagonal);
  Var t2m = ops::cross_entropy_sum(
      ops::scale(ops::matmul_nt(t, m), 1.0 / temperature), diagonal);
  return ops::scale(ops::add(m2t, t2m), 0.5 / b);
}

Var masked_prediction_loss(Tape &tape, Var motif_logits,
                           std::span<const int> motif_classes, Var word_logits,
                           std::span<const int> word_labels,
                           const LossConfig &config) {
  Var loss = tape.constant(Matrix(1, 1));
  if (!motif_classes.empty()) {
    Var ce = ops::cross_entropy_sum(motif_logits, motif_classes);
    const double w = config.normalize_masked
                         ? config.beta / static_cast<double>(motif_classes.size())
                         : config.beta;
    loss = ops::add(loss, ops::scale(ce, w));
  }
  if (!word_labels.empty()) {
    Var ce = ops::cross_entropy_sum(word_logits, word_labels);
    const double w = config.normalize_masked
                         ? config.alpha / static_cast<double>(word_labels.size())
                         : config.alpha;
    loss = ops::add(loss, ops::scale(ce, w));
  }
  return loss;
}

Var motif_logits(Tape &tape, const Model &model, Var h_motif,
                 std::span<const int> slots) {
  const ModelLayout &layout = model.layout();
  if (layout.motif_head.weight < 0)
    throw std::logic_error("model has no motif classifier");
  Var rows = ops::gather_rows(h_motif, slots);
  return linear(tape, model, layout.motif_head,
                layer_norm(tape, model, layout.motif_head_norm, rows));
}

MaskedPrediction masked_prediction_loss(Tape &tape, const Model &model,
                                        const FusionOutput &out,
                                        const MotifVocab &vocab,
                                        const LossConfig &config) {
  const ModelLayout &layout = model.layout();
  MaskedPrediction result;
  const std::vector<int> motif_slots = out.mask.motif_slots();
  const std::vector<int> word_slots = out.mask.word_slots();
  for (const MaskedSlot &m : out.mask.motif) {
    const int cls = vocab.maskable_index(m.label);
    if (cls < 0 || cls >= model.config().motif_classes)
      throw std::out_of_range("motif label " + std::to_string(m.label) +
                              " outside the motif classifier range");
    result.motif_targets.push_back(cls);
  }
  for (const MaskedSlot &w : out.mask.word) {
    if (w.label < 0 || w.label >= model.config().word_vocab_size)
      throw std::out_of_range("word label " + std::to_string(w.label) +
                              " outside the word classifier range");
    result.word_targets.push_back(w.label);
  }
  if (!motif_slots.empty()) {
    result.motif_logits = motif_logits(tape, model, out.h_motif, motif_slots);
    result.motif_predicted = argmax_rows(result.motif_logits.value());
  }
  if (!word_slots.empty()) {
    Var rows = ops::gather_rows(out.h_text, word_slots);
    result.word_logits =
        linear(tape, model, layout.word_head,
               layer_norm(tape, model, layout.word_head_norm, rows));
    result.word_predicted = argmax_rows(result.word_logits.value());
  }
  result.loss = masked_prediction_loss(tape, result.motif_logits,
                                       result.motif_targets, result.word_logits,
                                       result.word_targets, config);
  return result;
}

TotalLoss total_loss(Tape &tape, const Model &model,
                     std::span<const PairInput> batch, const MotifVocab &vocab,
                     const LossConfig &config) {
  const int b = static_cast<int>(batch.size());
  if (b < 2)
    throw std::invalid_argument("total_loss: batch size must be >= 2");
  MotifEmbeddingCache cache(tape);
  std::vector<Var> motif_globals, text_globals;
  Var masked = tape.constant(Matrix(1, 1));
  TotalLoss result;
  LossReport &rep = result.report;
  for (const PairInput &item : batch) {
    FusionOutput out =
        encode_pair(tape, model, *item.motifs, *item.text, item.mask, &cache);
    motif_globals.push_back(out.motif_global);
    text_globals.push_back(out.text_global);
    if (item.mask.empty())
      continue;
    MaskedPrediction mp = masked_prediction_loss(tape, model, out, vocab, config);
    masked = ops::add(masked, mp.loss);
    for (std::size_t i = 0; i < mp.motif_targets.size(); ++i)
      rep.motif_correct += mp.motif_predicted[i] == mp.motif_targets[i];
    for (std::size_t i = 0; i < mp.word_targets.size(); ++i)
      rep.word_correct += mp.word_predicted[i] == mp.word_targets[i];
    rep.motif_masked += static_cast<int>(mp.motif_targets.size());
    rep.word_masked += static_cast<int>(mp.word_targets.size());
    rep.motif_targets.insert(rep.motif_targets.end(), mp.motif_targets.begin(),
                             mp.motif_targets.end());
  }
  Var con = contrastive_loss(ops::concat_rows(motif_globals),
                             ops::concat_rows(text_globals),
                             config.temperature);
  Var pre = ops::scale(masked, 1.0 / b);
  result.loss = ops::add(con, pre);
  rep.contrastive = con.item();
  rep.masked = pre.item();
  rep.total = result.loss.item();
  return result;
}

}  // namespace moltext
