//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_EVALUATION_H_
#define MOLTEXT_EVALUATION_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moltext/corpus.h"
#include "moltext/model.h"
#include "moltext/training.h"
#include "moltext/vocab.h"

namespace moltext {

// ---- Retrieval -------------------------------------------------------------

// Global embedding of one modality with the other reduced to its lone global
// token and nothing masked.
std::vector<double> embed_pairless(const Model &model, const MotifSequence &seq);
std::vector<double> embed_pairless(const Model &model, const TextSequence &seq);

struct PairEmbeddings {
  Matrix graph;  // row i: molecule of pair i
  Matrix text;   // row i: description of pair i
};

PairEmbeddings embed_pairs(const Model &model,
                           std::span<const EncodedExample> data);

struct Retrieval {
  int chosen = -1;
  std::vector<double> scores;  // cosine per candidate
};

// Argmax of cosine similarity; ties go to the lowest index.
Retrieval retrieve(std::span<const double> query, const Matrix &candidates);

enum class RetrievalDirection { kGraphToText, kTextToGraph };

// For every pair, T-1 seeded distinct negatives from the other pairs plus the
// ground truth in a seeded slot. Throws std::invalid_argument if T < 2 or
// there are fewer than T pairs.
double retrieval_accuracy(const PairEmbeddings &embeddings, int candidates,
                          RetrievalDirection direction, std::uint64_t seed);

// ---- Editing ---------------------------------------------------------------

class Generator {
public:
  virtual ~Generator() = default;
  virtual int latent_width() const = 0;
  virtual std::vector<double> encode(const MolecularGraph &molecule) const = 0;
  virtual MolecularGraph decode(std::span<const double> latent) const = 0;
};

// Linear autoencoder (principal components) over library motif-count
// vectors. Decoding keeps the assemblable set of at most `max_motifs` library
// motifs that maximizes the summed excess of reconstructed counts over 0.5.
class MotifCountAutoencoder : public Generator {
public:
  static MotifCountAutoencoder fit(const MotifLibrary &library,
                                   std::span<const MolecularGraph> molecules,
                                   int latent_width = 0, int max_motifs = 4);

  int latent_width() const override { return components_.cols(); }
  std::vector<double> encode(const MolecularGraph &molecule) const override;
  MolecularGraph decode(std::span<const double> latent) const override;

  std::vector<double> motif_counts(const MolecularGraph &molecule) const;
  std::vector<double> reconstruct(std::span<const double> latent) const;
  std::vector<int> decode_motifs(std::span<const double> latent) const;

private:
  MotifCountAutoencoder(const MotifLibrary &library, int max_motifs);

  const MotifLibrary *library_;
  int max_motifs_;
  std::vector<double> mean_;
  Matrix components_;  // library size x latent width, orthonormal columns
  std::vector<std::vector<int>> candidate_sets_;
};

// p_g: latent -> model width, p_m: model width -> latent.
struct EditProjectors {
  // graph weight, graph bias, motif weight, motif bias
  std::vector<Parameter> params;

  const Parameter &graph_weight() const { return params.at(0); }
  const Parameter &graph_bias() const { return params.at(1); }
  const Parameter &motif_weight() const { return params.at(2); }
  const Parameter &motif_bias() const { return params.at(3); }
};

// Identity when square, otherwise seeded Gaussian.
EditProjectors init_projectors(int latent_width, int model_width,
                               std::uint64_t seed);

Var project_latent(Tape &tape, const EditProjectors &p, Var latent);
Var project_motif(Tape &tape, const EditProjectors &p, Var motif);

// Symmetric contrastive alignment between model globals (rows of `motif`) and
// generator latents (rows of `latent`) through the projectors.
Var alignment_loss(Tape &tape, const EditProjectors &p, Var motif, Var latent,
                   double temperature);

struct AlignConfig {
  int epochs = 200;
  int batch_size = 16;
  double learning_rate = 1e-2;
  double temperature = 0.1;
  std::uint64_t seed = 0;
};

struct AlignResult {
  EditProjectors projectors;
  std::vector<double> epoch_losses;
};

// Trains p_g and p_m; the model and generator stay frozen. Rows of
// `motif_globals` pair with rows of `latents`.
AlignResult align_projectors(const Matrix &motif_globals, const Matrix &latents,
                             const AlignConfig &config,
                             const EditProjectors *init = nullptr);

// Aligns projectors between the pairless molecule embeddings of `molecules`
// and their generator latents.
AlignResult align_to_model(const Model &model, const MotifVocab &vocab,
                           const Generator &generator,
                           std::span<const MolecularGraph> molecules,
                           const AlignConfig &config);

struct EditConfig {
  double anchor_weight = 0.1;  // lambda
  int steps = 100;
  double step_size = 0.1;
  double temperature = 0.1;
};

struct EditResult {
  std::vector<double> initial_latent;
  std::vector<double> latent;
  double initial_cosine = 0;
  double final_cosine = 0;
  MolecularGraph molecule;
};

// Proximal gradient descent on -cos(p_g(w*), prompt)/temperature +
// lambda * ||w* - w||^2 from w = encode(molecule). Throws std::runtime_error
// on a non-finite latent.
EditResult edit_molecule(const MolecularGraph &molecule,
                         std::span<const double> prompt_embedding,
                         const Generator &generator,
                         const EditProjectors &projectors,
                         const EditConfig &config);

// Fraction of molecules containing `motif`. Throws on an empty set.
double hit_ratio(std::span<const MolecularGraph> molecules,
                 const MolecularGraph &motif);

// ---- Property prediction ---------------------------------------------------

// Exact Mann-Whitney statistic; ties count one half. Throws
// std::invalid_argument unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct PropertyConfig {
  bool finetune = false;
  double test_fraction = 0.2;
  int epochs = 200;
  double head_learning_rate = 1e-2;
  double backbone_learning_rate = 1e-4;
  int batch_size = 16;
  std::uint64_t seed = 0;
};

struct PropertyResult {
  double auc = 0;
  int train_size = 0;
  int test_size = 0;
};

// Logistic head on the pairless molecule global embedding, seeded split.
// Needs >= 20 examples and binary labels.
PropertyResult property_finetune(std::span<const MotifSequence> molecules,
                                 std::span<const int> labels,
                                 const Model &model,
                                 const PropertyConfig &config);

// ---- Attribution -----------------------------------------------------------

struct AttributionConfig {
  int samples = 1000;
  double kernel_width = 0.25;
  std::uint64_t seed = 0;
};

struct WordImportance {
  // One coefficient per word slot 1..D of the text.
  std::vector<double> weights;
  double intercept = 0;
  // Probability of the true motif with the full text.
  double base_probability = 0;
};

// Probability of the true label at `masked_slot` (which is masked) given the
// text with the words at `dropped` slots replaced by <MASK>.
double masked_motif_probability(const Model &model, const MotifVocab &vocab,
                                const MotifSequence &motifs,
                                const TextSequence &text, int masked_slot,
                                std::span<const int> dropped);

// Perturbation surrogate: random keep/drop patterns over the words, weighted
// by exp(-(d/D)^2 / width^2) with d the number of dropped words, fitted by
// weighted least squares.
WordImportance word_importance(const Model &model, const MotifVocab &vocab,
                               const MotifSequence &motifs,
                               const TextSequence &text, int masked_slot,
                               const AttributionConfig &config);

// Same surrogate over all 2^D patterns (D <= 16).
WordImportance word_importance_exhaustive(const Model &model,
                                          const MotifVocab &vocab,
                                          const MotifSequence &motifs,
                                          const TextSequence &text,
                                          int masked_slot,
                                          double kernel_width = 0.25);

double spearman(std::span<const double> a, std::span<const double> b);

// ---- Ablations -------------------------------------------------------------

enum class AblationKind {
  kFull,
  kWithoutMmm,
  kMotifMaskOnly,
  kWordMaskOnly,
  kWithoutCrossAttention,
};

// "full", "w/o-mmm", "motif-mask-only", "word-mask-only",
// "w/o-cross-attention". Throws std::invalid_argument otherwise.
AblationKind parse_ablation(std::string_view name);
const char *ablation_name(AblationKind kind);
TrainConfig build_ablation_variant(TrainConfig base, AblationKind kind);

}  // namespace moltext

#endif  // MOLTEXT_EVALUATION_H_
