//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner. Prints one PASS/FAIL line per criterion and exits 1 if
// any criterion fails. Arguments restrict the run to the named criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.h"
#include "gradcheck.h"
#include "moltext/checkpoint.h"
#include "moltext/corpus.h"
#include "moltext/evaluation.h"
#include "moltext/fusion.h"
#include "moltext/objectives.h"
#include "moltext/training.h"

namespace moltext {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- Shared retrieval setup ------------------------------------------------

constexpr int kTrainPairs = 500;
constexpr int kTestPairs = 200;

TrainConfig retrieval_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  return cfg;
}

struct RetrievalRun {
  std::optional<TrainResult> result;
  Vocabularies vocab;
  std::vector<SyntheticExample> train, test;
  double graph_to_text = 0, text_to_graph = 0;
  double seconds = 0;

  double mean() const { return 0.5 * (graph_to_text + text_to_graph); }
};

RetrievalRun run_retrieval(AblationKind kind, std::uint64_t seed) {
  const auto t0 = Clock::now();
  RetrievalRun run;
  const MotifLibrary lib = MotifLibrary::standard();
  CorpusSplit split = split_by_combination(
      generate_synthetic_corpus(800, lib, 100 + seed), kTestPairs, seed);
  if (static_cast<int>(split.train.size()) < kTrainPairs ||
      static_cast<int>(split.test.size()) < kTestPairs)
    throw std::runtime_error("synthetic split too small");
  split.train.resize(kTrainPairs);
  split.test.resize(kTestPairs);
  run.train = std::move(split.train);
  run.test = std::move(split.test);

  const TrainConfig cfg = build_ablation_variant(retrieval_config(seed), kind);
  const auto train_pairs = pairs_of(run.train);
  const auto test_pairs = pairs_of(run.test);
  run.vocab = build_vocabularies(train_pairs, cfg);
  const auto data = encode_examples(train_pairs, run.vocab.motifs,
                                    run.vocab.words, cfg.model.max_positions);
  const auto test = encode_examples(test_pairs, run.vocab.motifs,
                                    run.vocab.words, cfg.model.max_positions);
  run.result.emplace(train(data, run.vocab.motifs, run.vocab.words, cfg));
  const PairEmbeddings emb = embed_pairs(run.result->model, test);
  run.graph_to_text =
      retrieval_accuracy(emb, 4, RetrievalDirection::kGraphToText, seed);
  run.text_to_graph =
      retrieval_accuracy(emb, 4, RetrievalDirection::kTextToGraph, seed);
  run.seconds = seconds_since(t0);
  return run;
}

std::optional<RetrievalRun> g_full;

const RetrievalRun &full_run() {
  if (!g_full)
    g_full.emplace(run_retrieval(AblationKind::kFull, 0));
  return *g_full;
}

std::vector<MolecularGraph> graphs_of(std::span<const SyntheticExample> corpus) {
  std::vector<MolecularGraph> out;
  for (const SyntheticExample &e : corpus)
    out.push_back(parse_smiles(e.pair.smiles));
  return out;
}

// ---- Criteria --------------------------------------------------------------

Outcome a1_training_sanity() {
  const auto t0 = Clock::now();
  const auto pairs =
      pairs_of(generate_synthetic_corpus(200, MotifLibrary::standard(), 11));
  TrainConfig cfg;
  cfg.seed = 1;
  const Vocabularies v = build_vocabularies(pairs, cfg);
  const auto data =
      encode_examples(pairs, v.motifs, v.words, cfg.model.max_positions);
  const TrainResult r = train(data, v.motifs, v.words, cfg);
  const EpochMetrics &first = r.metrics.front(), &last = r.metrics.back();
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = last.loss < first.loss &&
           last.motif_accuracy > last.motif_majority_baseline && secs <= 600;
  o.detail = fmt("loss %.4f -> %.4f, motif acc %.3f vs baseline %.3f, %.0fs",
                 first.loss, last.loss, last.motif_accuracy,
                 last.motif_majority_baseline, secs);
  return o;
}

Outcome a2_retrieval() {
  const RetrievalRun &r = full_run();
  Outcome o;
  o.pass = r.graph_to_text >= 0.70 && r.text_to_graph >= 0.70 &&
           std::abs(r.graph_to_text - r.text_to_graph) <= 0.10 &&
           r.seconds <= 900;
  o.detail = fmt("graph->text %.3f, text->graph %.3f (chance 0.25), %.0fs",
                 r.graph_to_text, r.text_to_graph, r.seconds);
  return o;
}

Outcome a3_ablations() {
  std::map<AblationKind, double> mean;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (AblationKind k : {AblationKind::kFull, AblationKind::kWithoutCrossAttention,
                           AblationKind::kWithoutMmm}) {
      const double acc = k == AblationKind::kFull && seed == 0
                             ? full_run().mean()
                             : run_retrieval(k, seed).mean();
      mean[k] += acc / 3;
      per_seed += fmt(" %s/%d=%.3f", ablation_name(k), int(seed), acc);
    }
  }
  const double full = mean[AblationKind::kFull];
  const double cross = mean[AblationKind::kWithoutCrossAttention];
  const double mmm = mean[AblationKind::kWithoutMmm];
  Outcome o;
  o.pass = full - cross >= 0.03 && full - mmm >= 0.03;
  o.detail = fmt("full %.3f, w/o-cross-attention %.3f, w/o-mmm %.3f;",
                 full, cross, mmm) +
             per_seed;
  return o;
}

Outcome a4_gradients() {
  const auto t0 = Clock::now();
  testing::TinyCorpus corpus = testing::make_tiny_corpus();
  Model model(testing::tiny_config(corpus), 4);
  std::vector<PairInput> batch;
  for (int i = 0; i < 2; ++i)
    batch.push_back({&corpus.motifs[i], &corpus.text[i],
                     sample_masks(corpus.motifs[i], corpus.text[i],
                                  corpus.motif_vocab, {0.5, 0.3}, 40 + i)});
  std::vector<Parameter *> params;
  for (Parameter &p : model.parameters())
    params.push_back(&p);
  const auto r = testing::check_gradients(
      params,
      [&](Tape &t) {
        return total_loss(t, model, batch, corpus.motif_vocab, {}).loss;
      },
      0.01, 99, 1e-5, 1);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = r.max_relative_error < 1e-4 && secs <= 60;
  o.detail = fmt("max relative error %.2e over %d entries, %.1fs",
                 r.max_relative_error, r.checked, secs);
  return o;
}

Outcome a5_editing() {
  const RetrievalRun &run = full_run();
  const Model &model = run.result->model;
  const MotifLibrary lib = MotifLibrary::standard();
  const auto fit_set = graphs_of(run.train);
  const auto generator = MotifCountAutoencoder::fit(lib, fit_set);
  AlignConfig align;
  const AlignResult aligned =
      align_to_model(model, run.vocab.motifs, generator, fit_set, align);
  const auto pool =
      graphs_of(generate_synthetic_corpus(400, lib, 505));

  double total = 0;
  std::string per_target;
  for (int t = 0; t < lib.size(); ++t) {
    std::vector<MolecularGraph> inputs;
    for (const MolecularGraph &g : pool)
      if (inputs.size() < 50 && !contains_motif(g, lib.graph(t)))
        inputs.push_back(g);
    const std::string prompt_text =
        "this molecule contains " + lib.motif(t).name;
    const auto prompt = embed_pairless(
        model, tokenize_text(prompt_text, run.vocab.words));
    std::vector<MolecularGraph> edited;
    for (const MolecularGraph &g : inputs)
      edited.push_back(
          edit_molecule(g, prompt, generator, aligned.projectors, {}).molecule);
    const double before = hit_ratio(inputs, lib.graph(t));
    const double after = hit_ratio(edited, lib.graph(t));
    total += (after - before) / lib.size();
    per_target += fmt(" %s=%.2f", lib.motif(t).name.c_str(), after - before);
  }
  Outcome o;
  o.pass = total >= 0.2;
  o.detail = fmt("mean hit-ratio gain %.3f over %d targets;", total,
                 lib.size()) +
             per_target;
  return o;
}

Outcome a6_property() {
  const RetrievalRun &run = full_run();
  const MotifLibrary lib = MotifLibrary::standard();
  const int benzene = lib.find("benzene");
  const auto corpus = generate_synthetic_corpus(400, lib, 606);
  std::vector<MotifSequence> molecules;
  std::vector<int> labels;
  for (const SyntheticExample &e : corpus) {
    molecules.push_back(
        tokenize_molecule(parse_smiles(e.pair.smiles), run.vocab.motifs));
    labels.push_back(std::count(e.motifs.begin(), e.motifs.end(), benzene) > 0);
  }
  PropertyConfig cfg;
  cfg.finetune = true;
  cfg.epochs = 20;
  const double auc =
      property_finetune(molecules, labels, run.result->model, cfg).auc;

  double random_mean = 0;
  std::string per_seed;
  std::bernoulli_distribution coin(0.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(600 + seed);
    std::vector<int> random_labels;
    for (std::size_t i = 0; i < molecules.size(); ++i)
      random_labels.push_back(coin(rng));
    PropertyConfig rc = cfg;
    rc.seed = seed;
    const double a =
        property_finetune(molecules, random_labels, run.result->model, rc).auc;
    random_mean += a / 5;
    per_seed += fmt(" %.3f", a);
  }
  Outcome o;
  o.pass = auc >= 0.9 && random_mean >= 0.35 && random_mean <= 0.65;
  o.detail = fmt("contains-benzene AUC %.3f, random-label AUC mean %.3f over "
                 "5 seeds (",
                 auc, random_mean) +
             per_seed.substr(1) + ")";
  return o;
}

Outcome a7_loss_values() {
  Tape tape;
  const double con =
      contrastive_loss(tape.constant(Matrix::from_rows({{1, 1}, {1, 1}})),
                       tape.constant(Matrix::from_rows({{1, 2}, {1, 2}})), 0.07)
          .item();
  const int mlab[] = {1};
  const int wlab[] = {3};
  LossConfig cfg;
  cfg.alpha = 0.5;
  cfg.beta = 1.0;
  const double masked =
      masked_prediction_loss(tape, tape.constant(Matrix(1, 4)), mlab,
                             tape.constant(Matrix(1, 4)), wlab, cfg)
          .item();
  Outcome o;
  o.pass = std::abs(con - std::log(2.0)) < 1e-12 &&
           std::abs(masked - 2.0794) <= 1e-4;
  o.detail = fmt("contrastive %.12f (ln 2 = %.12f), masked %.6f", con,
                 std::log(2.0), masked);
  return o;
}

Outcome a8_determinism() {
  const auto pairs =
      pairs_of(generate_synthetic_corpus(60, MotifLibrary::standard(), 88));
  TrainConfig cfg;
  cfg.seed = 8;
  cfg.epochs = 3;
  cfg.model.fusion.width = 32;
  cfg.model.fusion.ff_width = 64;
  cfg.model.graph.width = 16;
  const Vocabularies v = build_vocabularies(pairs, cfg);
  const auto data =
      encode_examples(pairs, v.motifs, v.words, cfg.model.max_positions);
  auto run_once = [&](std::string &metrics) {
    TrainResult r = train(data, v.motifs, v.words, cfg,
                          [&](const EpochMetrics &m) {
                            metrics += nlohmann::json(m).dump() + "\n";
                          });
    return std::make_pair(serialize_checkpoint(r.model, cfg, v.motifs, v.words,
                                               {cfg.seed, cfg.epochs, r.steps}),
                          std::move(r.model));
  };
  std::string m1, m2;
  auto [ckpt1, model1] = run_once(m1);
  auto [ckpt2, model2] = run_once(m2);
  const Checkpoint back = parse_checkpoint(ckpt1, v.motifs, v.words);

  bool forward_equal = true;
  for (int i = 0; i < 4; ++i) {
    const MaskSpec mask =
        sample_masks(data[i].motifs, data[i].text, v.motifs, cfg.mask_rates, i);
    Tape ta(false), tb(false);
    const FusionOutput a =
        encode_pair(ta, model1, data[i].motifs, data[i].text, mask);
    const FusionOutput b =
        encode_pair(tb, back.model, data[i].motifs, data[i].text, mask);
    forward_equal = forward_equal && a.h_motif.value() == b.h_motif.value() &&
                    a.h_text.value() == b.h_text.value() &&
                    a.z_motif.value() == b.z_motif.value() &&
                    a.z_text.value() == b.z_text.value();
  }
  Outcome o;
  o.pass = m1 == m2 && ckpt1 == ckpt2 && forward_equal;
  o.detail = fmt("metrics identical %s, checkpoints identical %s (%zu bytes), "
                 "round-trip forward exact %s",
                 m1 == m2 ? "yes" : "no", ckpt1 == ckpt2 ? "yes" : "no",
                 ckpt1.size(), forward_equal ? "yes" : "no");
  return o;
}

std::vector<int> random_permutation(int n, std::mt19937_64 &rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i)
    p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

std::vector<std::string> sorted_keys(const Fragmentation &f) {
  std::vector<std::string> keys;
  for (const Motif &m : f.motifs)
    keys.push_back(m.canonical_key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

Outcome a9_fragmentation() {
  std::vector<std::string> smiles = {
      "CC(=O)Oc1ccccc1C(=O)O", "CN1CCCC1c1cccnc1", "c1ccc2ccccc2c1",
      "OCC(O)CO", "Clc1ccc(cc1)C(c1ccccc1)N1CCNCC1", "CCOC(=O)c1ccc(N)cc1",
      "O=C(O)CCc1ccccc1", "C1CC1NC(=O)c1ccncc1", "[NH3+]CC(=O)[O-]"};
  for (const auto &e :
       generate_synthetic_corpus(60, MotifLibrary::standard(), 909))
    smiles.push_back(e.pair.smiles);

  std::mt19937_64 rng(9);
  int partition_bad = 0, contains_bad = 0, permutation_bad = 0, oversized = 0;
  for (const std::string &s : smiles) {
    const MolecularGraph g = parse_smiles(s);
    const Fragmentation f = fragment(g);
    std::vector<int> seen(g.atom_count(), 0);
    for (const Motif &m : f.motifs) {
      for (int a : m.atom_indices)
        ++seen[a];
      // contains_motif requires motifs of at most 16 atoms.
      if (m.subgraph.atom_count() > 16)
        ++oversized;
      else
        contains_bad += !contains_motif(g, m);
    }
    partition_bad += std::any_of(seen.begin(), seen.end(),
                                 [](int c) { return c != 1; });
    const auto keys = sorted_keys(f);
    for (int trial = 0; trial < 100; ++trial)
      permutation_bad +=
          sorted_keys(fragment(g.permuted(random_permutation(g.atom_count(), rng)))) != keys;
  }

  // Constructed count tables against brute-force thresholds.
  int threshold_bad = 0;
  {
    const MotifVocab v =
        MotifVocab::from_counts({{"A", 1}, {"B", 10}, {"C", 100000}});
    threshold_bad += build_masking_set(v, 8, 80005) != std::set<int>{v.lookup("B")};
  }
  std::uniform_int_distribution<std::int64_t> count(1, 200);
  for (int table = 0; table < 50; ++table) {
    std::map<std::string, std::int64_t> counts;
    for (int k = 0; k < 30; ++k)
      counts["K" + std::to_string(k)] = count(rng);
    const MotifVocab v = MotifVocab::from_counts(counts);
    std::int64_t lo = count(rng), hi = count(rng);
    if (lo > hi)
      std::swap(lo, hi);
    std::set<int> want;
    for (const auto &[key, c] : counts)
      if (c >= lo && c <= hi)
        want.insert(v.lookup(key));
    threshold_bad += build_masking_set(v, lo, hi) != want;
  }
  Outcome o;
  o.pass = partition_bad == 0 && contains_bad == 0 && permutation_bad == 0 &&
           threshold_bad == 0;
  o.detail = fmt("%zu molecules: partition failures %d, contains_motif "
                 "failures %d (%d motifs over 16 atoms not checked), "
                 "permutation mismatches %d/%zu, threshold mismatches %d/51",
                 smiles.size(), partition_bad, contains_bad, oversized,
                 permutation_bad, smiles.size() * 100, threshold_bad);
  return o;
}

Outcome a10_attribution() {
  const RetrievalRun &run = full_run();
  const Model &model = run.result->model;
  const MotifLibrary lib = MotifLibrary::standard();
  SyntheticCorpusOptions opts;
  opts.name_probability = 0.0;  // exactly one motif named per text
  const auto corpus = generate_synthetic_corpus(200, lib, 1010, opts);

  int cases = 0, top = 0;
  double rho_sum = 0, rho_min = 1;
  for (const SyntheticExample &e : corpus) {
    if (cases == 20)
      break;
    const int named = e.motifs[std::find(e.named.begin(), e.named.end(), true) -
                               e.named.begin()];
    const MotifSequence motifs =
        tokenize_molecule(parse_smiles(e.pair.smiles), run.vocab.motifs);
    const TextSequence text = tokenize_text(e.pair.text, run.vocab.words);
    const int label = run.vocab.motifs.lookup(lib.key(named));
    int slot = -1;
    for (int s = 1; s < motifs.length(); ++s)
      if (motifs.labels[s] == label && run.vocab.motifs.is_maskable(label))
        slot = s;
    const auto word = std::find(text.words.begin(), text.words.end(),
                                lib.motif(named).name);
    if (slot < 0 || word == text.words.end() || text.length() - 1 > 16)
      continue;
    const int word_slot = static_cast<int>(word - text.words.begin());
    AttributionConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(cases);
    const WordImportance sampled = word_importance(
        model, run.vocab.motifs, motifs, text, slot, cfg);
    const WordImportance exact = word_importance_exhaustive(
        model, run.vocab.motifs, motifs, text, slot, cfg.kernel_width);
    const double best =
        *std::max_element(sampled.weights.begin(), sampled.weights.end());
    top += sampled.weights[word_slot - 1] == best;
    const double rho = spearman(sampled.weights, exact.weights);
    rho_sum += rho;
    rho_min = std::min(rho_min, rho);
    ++cases;
  }
  Outcome o;
  const double rho_mean = cases > 0 ? rho_sum / cases : 0;
  o.pass = cases == 20 && top >= 16 && rho_mean >= 0.8;
  o.detail = fmt("naming word ranked first in %d/%d, Spearman vs exhaustive "
                 "mean %.3f (min %.3f)",
                 top, cases, rho_mean, rho_min);
  return o;
}

}  // namespace
}  // namespace moltext

int main(int argc, char **argv) {
  using namespace moltext;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1", a1_training_sanity}, {"A2", a2_retrieval},
      {"A3", a3_ablations},       {"A4", a4_gradients},
      {"A5", a5_editing},         {"A6", a6_property},
      {"A7", a7_loss_values},     {"A8", a8_determinism},
      {"A9", a9_fragmentation},   {"A10", a10_attribution},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto &[name, run] : criteria) {
    if (!selected.empty() && !selected.contains(name))
      continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    all_pass = all_pass && o.pass;
    std::printf("%-4s %s  %s\n", name.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
