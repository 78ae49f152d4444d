//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/training.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "moltext/json_util.h"
#include "moltext/seed.h"

namespace moltext {

void TrainConfig::validate() const {
  if (batch_size < 2)
    throw std::invalid_argument("train: batch_size must be >= 2");
  if (epochs < 0)
    throw std::invalid_argument("train: epochs must be >= 0");
  for (double lr : learning_rates)
    if (!(lr >= 0) || !std::isfinite(lr))
      throw std::invalid_argument("train: learning rates must be >= 0");
  for (double r : {mask_rates.motif, mask_rates.word})
    if (!(r >= 0 && r <= 1))
      throw std::invalid_argument("train: mask rates must lie in [0, 1]");
  if (!(loss.temperature > 0))
    throw std::invalid_argument("train: temperature must be > 0");
  if (mask_min_count > mask_max_count)
    throw std::invalid_argument("train: mask_min_count > mask_max_count");
  if (min_word_frequency < 1)
    throw std::invalid_argument("train: min_word_frequency must be >= 1");
}

void to_json(nlohmann::json &j, const TrainConfig &c) {
  nlohmann::json lr;
  for (int g = 0; g < kParamGroupCount; ++g)
    lr[param_group_name(static_cast<ParamGroup>(g))] = c.learning_rates[g];
  j = nlohmann::json{
      {"seed", c.seed},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"learning_rates", lr},
      {"mask_rates", {{"motif", c.mask_rates.motif}, {"word", c.mask_rates.word}}},
      {"loss", c.loss},
      {"model", c.model},
      {"mask_min_count", c.mask_min_count},
      {"mask_max_count", c.mask_max_count},
      {"min_word_frequency", c.min_word_frequency},
      {"resample_masks", c.resample_masks},
      {"shuffle", c.shuffle},
  };
}

void from_json(const nlohmann::json &j, TrainConfig &c) {
  check_keys(j, "train",
             {"seed", "batch_size", "epochs", "learning_rates", "mask_rates",
              "loss", "model", "mask_min_count", "mask_max_count",
              "min_word_frequency", "resample_masks", "shuffle"});
  read_field(j, "seed", c.seed);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "epochs", c.epochs);
  if (j.contains("learning_rates")) {
    const auto &lr = j.at("learning_rates");
    if (lr.is_number()) {
      c.learning_rates.fill(lr.get<double>());
    } else {
      check_keys(lr, "train.learning_rates",
                 {"graph_encoder", "text_encoder", "projector", "fusion",
                  "classifier"});
      for (int g = 0; g < kParamGroupCount; ++g)
        read_field(lr, param_group_name(static_cast<ParamGroup>(g)),
                   c.learning_rates[g]);
    }
  }
  if (j.contains("mask_rates")) {
    const auto &m = j.at("mask_rates");
    check_keys(m, "train.mask_rates", {"motif", "word"});
    read_field(m, "motif", c.mask_rates.motif);
    read_field(m, "word", c.mask_rates.word);
  }
  if (j.contains("loss"))
    from_json(j.at("loss"), c.loss);
  if (j.contains("model"))
    from_json(j.at("model"), c.model);
  read_field(j, "mask_min_count", c.mask_min_count);
  read_field(j, "mask_max_count", c.mask_max_count);
  read_field(j, "min_word_frequency", c.min_word_frequency);
  read_field(j, "resample_masks", c.resample_masks);
  read_field(j, "shuffle", c.shuffle);
}

Vocabularies build_vocabularies(std::span<const PairExample> pairs,
                                const TrainConfig &config) {
  std::vector<std::string> smiles, texts;
  for (const PairExample &p : pairs) {
    smiles.push_back(p.smiles);
    texts.push_back(p.text);
  }
  Vocabularies v;
  MotifVocabBuild built = build_motif_vocab(smiles);
  v.motifs = std::move(built.vocab);
  v.report = std::move(built.report);
  v.motifs.set_maskable(build_masking_set(v.motifs, config.mask_min_count,
                                          config.mask_max_count));
  v.words = WordVocab::build(texts, config.min_word_frequency);
  return v;
}

std::vector<EncodedExample> encode_examples(std::span<const PairExample> pairs,
                                            const MotifVocab &motif_vocab,
                                            const WordVocab &word_vocab,
                                            int max_positions) {
  std::vector<EncodedExample> out;
  out.reserve(pairs.size());
  for (const PairExample &p : pairs) {
    EncodedExample e;
    e.id = p.id;
    try {
      e.motifs = tokenize_molecule(parse_smiles(p.smiles), motif_vocab);
    } catch (const std::exception &err) {
      throw std::invalid_argument("record \"" + p.id + "\": " + err.what());
    }
    e.text = tokenize_text(p.text, word_vocab);
    if (e.motifs.length() > max_positions || e.text.length() > max_positions)
      throw std::invalid_argument("record \"" + p.id +
                                  "\": sequence longer than max_positions");
    out.push_back(std::move(e));
  }
  return out;
}

void to_json(nlohmann::json &j, const EpochMetrics &m) {
  j = nlohmann::json{{"epoch", m.epoch},
                     {"batches", m.batches},
                     {"loss", m.loss},
                     {"contrastive", m.contrastive},
                     {"masked", m.masked},
                     {"motif_accuracy", m.motif_accuracy},
                     {"word_accuracy", m.word_accuracy},
                     {"motif_majority_baseline", m.motif_majority_baseline},
                     {"masked_motifs", m.masked_motifs},
                     {"masked_words", m.masked_words}};
}

TrainingDivergence::TrainingDivergence(int epoch, int batch)
    : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch)),
      epoch_(epoch), batch_(batch) {}

ModelConfig resolved_model_config(const TrainConfig &config,
                                  const MotifVocab &motif_vocab,
                                  const WordVocab &word_vocab) {
  ModelConfig mc = config.model;
  mc.word_vocab_size = word_vocab.size();
  mc.motif_classes = motif_vocab.maskable_count();
  return mc;
}

std::uint64_t model_seed(std::uint64_t seed) {
  return derive_seed(seed, {0x6d6f64656cULL});
}

std::uint64_t mask_seed(std::uint64_t seed, int epoch, int example,
                        bool resample) {
  return derive_seed(seed, {0x6d61736bULL,
                            static_cast<std::uint64_t>(resample ? epoch : 0),
                            static_cast<std::uint64_t>(example)});
}

TrainResult train(std::span<const EncodedExample> data,
                  const MotifVocab &motif_vocab, const WordVocab &word_vocab,
                  const TrainConfig &config, const EpochCallback &on_epoch) {
  config.validate();
  Model model(resolved_model_config(config, motif_vocab, word_vocab),
              model_seed(config.seed));
  return train(std::move(model), data, motif_vocab, config, on_epoch);
}

TrainResult train(Model model, std::span<const EncodedExample> data,
                  const MotifVocab &motif_vocab, const TrainConfig &config,
                  const EpochCallback &on_epoch) {
  config.validate();
  const int n = static_cast<int>(data.size());
  if (n < config.batch_size)
    throw std::invalid_argument("train: dataset smaller than batch_size");

  AdamConfig adam_cfg;
  adam_cfg.learning_rates = config.learning_rates;
  TrainResult result{std::move(model), {}, 0};
  Model &m = result.model;
  Adam adam(m.parameters(), adam_cfg);
  std::vector<int> order(n);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    if (config.shuffle) {
      std::mt19937_64 rng(derive_seed(config.seed, {0x6f72646572ULL,
                                                    static_cast<std::uint64_t>(epoch)}));
      std::shuffle(order.begin(), order.end(), rng);
    }
    EpochMetrics em;
    em.epoch = epoch;
    int motif_correct = 0, word_correct = 0;
    std::map<int, int> target_counts;
    for (int start = 0; start + 2 <= n; start += config.batch_size) {
      const int end = std::min(n, start + config.batch_size);
      if (end - start < 2)
        break;
      std::vector<PairInput> batch;
      for (int i = start; i < end; ++i) {
        const EncodedExample &ex = data[order[i]];
        batch.push_back({&ex.motifs, &ex.text,
                         sample_masks(ex.motifs, ex.text, motif_vocab,
                                      config.mask_rates,
                                      mask_seed(config.seed, epoch, order[i],
                                                config.resample_masks))});
      }
      Tape tape;
      TotalLoss loss = total_loss(tape, m, batch, motif_vocab, config.loss);
      if (!std::isfinite(loss.report.total))
        throw TrainingDivergence(epoch, em.batches);
      tape.backward(loss.loss);
      adam.step(m.parameters(), tape);
      ++result.steps;

      ++em.batches;
      em.loss += loss.report.total;
      em.contrastive += loss.report.contrastive;
      em.masked += loss.report.masked;
      motif_correct += loss.report.motif_correct;
      word_correct += loss.report.word_correct;
      em.masked_motifs += loss.report.motif_masked;
      em.masked_words += loss.report.word_masked;
      for (int t : loss.report.motif_targets)
        ++target_counts[t];
    }
    if (em.batches > 0) {
      em.loss /= em.batches;
      em.contrastive /= em.batches;
      em.masked /= em.batches;
    }
    if (em.masked_motifs > 0) {
      em.motif_accuracy = double(motif_correct) / em.masked_motifs;
      int top = 0;
      for (const auto &[label, count] : target_counts)
        top = std::max(top, count);
      em.motif_majority_baseline = double(top) / em.masked_motifs;
    }
    if (em.masked_words > 0)
      em.word_accuracy = double(word_correct) / em.masked_words;
    result.metrics.push_back(em);
    if (on_epoch)
      on_epoch(em);
  }
  return result;
}

}  // namespace moltext
