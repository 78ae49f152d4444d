//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "moltext/evaluation.h"
#include "moltext/optimizer.h"

namespace moltext {

MotifCountAutoencoder::MotifCountAutoencoder(const MotifLibrary &library,
                                             int max_motifs)
    : library_(&library), max_motifs_(max_motifs) {
  const int l = library.size();
  std::vector<int> current;
  auto visit = [&](auto &&self, int next) -> void {
    if (!current.empty() && library.assemblable(current))
      candidate_sets_.push_back(current);
    if (static_cast<int>(current.size()) == max_motifs_)
      return;
    for (int m = next; m < l; ++m) {
      current.push_back(m);
      self(self, m + 1);
      current.pop_back();
    }
  };
  visit(visit, 0);
}

std::vector<double>
MotifCountAutoencoder::motif_counts(const MolecularGraph &molecule) const {
  std::vector<double> counts(library_->size(), 0.0);
  for (const Motif &m : fragment(molecule).motifs)
    for (int i = 0; i < library_->size(); ++i)
      if (library_->key(i) == m.canonical_key)
        counts[i] += 1.0;
  return counts;
}

MotifCountAutoencoder
MotifCountAutoencoder::fit(const MotifLibrary &library,
                           std::span<const MolecularGraph> molecules,
                           int latent_width, int max_motifs) {
  if (molecules.empty())
    throw std::invalid_argument("autoencoder: no molecules");
  if (max_motifs < 1)
    throw std::invalid_argument("autoencoder: max_motifs must be >= 1");
  MotifCountAutoencoder ae(library, max_motifs);
  const int l = library.size();
  const int n = static_cast<int>(molecules.size());
  Eigen::MatrixXd x(n, l);
  for (int i = 0; i < n; ++i) {
    const auto c = ae.motif_counts(molecules[i]);
    for (int j = 0; j < l; ++j)
      x(i, j) = c[j];
  }
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues ascend; keep the largest.
  const double top = eig.eigenvalues()(l - 1);
  int rank = 0;
  for (int j = 0; j < l; ++j)
    rank += eig.eigenvalues()(j) > 1e-10 * std::max(top, 1e-300);
  const int k = latent_width > 0 ? std::min(latent_width, l) : std::max(rank, 1);
  ae.mean_.assign(mean.data(), mean.data() + l);
  ae.components_ = Matrix(l, k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(l - 1 - c);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0)
      v = -v;
    for (int j = 0; j < l; ++j)
      ae.components_(j, c) = v(j);
  }
  return ae;
}

std::vector<double>
MotifCountAutoencoder::encode(const MolecularGraph &molecule) const {
  const auto c = motif_counts(molecule);
  std::vector<double> w(latent_width(), 0.0);
  for (int j = 0; j < components_.rows(); ++j)
    for (int k = 0; k < latent_width(); ++k)
      w[k] += (c[j] - mean_[j]) * components_(j, k);
  return w;
}

std::vector<double>
MotifCountAutoencoder::reconstruct(std::span<const double> latent) const {
  if (static_cast<int>(latent.size()) != latent_width())
    throw std::invalid_argument("autoencoder: latent width mismatch");
  std::vector<double> c(mean_);
  for (int j = 0; j < components_.rows(); ++j)
    for (int k = 0; k < latent_width(); ++k)
      c[j] += components_(j, k) * latent[k];
  return c;
}

std::vector<int>
MotifCountAutoencoder::decode_motifs(std::span<const double> latent) const {
  const auto c = reconstruct(latent);
  const std::vector<int> *best = nullptr;
  double best_score = -INFINITY;
  for (const auto &set : candidate_sets_) {
    double s = 0;
    for (int m : set)
      s += c[m] - 0.5;
    if (s > best_score) {
      best_score = s;
      best = &set;
    }
  }
  return *best;
}

MolecularGraph
MotifCountAutoencoder::decode(std::span<const double> latent) const {
  return library_->assemble(decode_motifs(latent));
}

EditProjectors init_projectors(int latent_width, int model_width,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto make = [&](int in, int out) {
    Matrix m(in, out);
    if (in == out) {
      for (int i = 0; i < in; ++i)
        m(i, i) = 1.0;
    } else {
      std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(double(in)));
      for (double &v : m.values())
        v = dist(rng);
    }
    return m;
  };
  EditProjectors p;
  p.params = {
      {"edit.graph.weight", ParamGroup::kProjector, make(latent_width, model_width)},
      {"edit.graph.bias", ParamGroup::kProjector, Matrix(1, model_width)},
      {"edit.motif.weight", ParamGroup::kProjector, make(model_width, latent_width)},
      {"edit.motif.bias", ParamGroup::kProjector, Matrix(1, latent_width)},
  };
  return p;
}

Var project_latent(Tape &tape, const EditProjectors &p, Var latent) {
  return ops::add_row(ops::matmul(latent, tape.param(p.graph_weight())),
                      tape.param(p.graph_bias()));
}

Var project_motif(Tape &tape, const EditProjectors &p, Var motif) {
  return ops::add_row(ops::matmul(motif, tape.param(p.motif_weight())),
                      tape.param(p.motif_bias()));
}

Var alignment_loss(Tape &tape, const EditProjectors &p, Var motif, Var latent,
                   double temperature) {
  const int b = motif.rows();
  if (b < 2 || latent.rows() != b)
    throw std::invalid_argument("alignment: batch size must be >= 2");
  std::vector<int> diagonal(b);
  std::iota(diagonal.begin(), diagonal.end(), 0);
  Var z = ops::l2_normalize_rows(motif);
  Var w = ops::l2_normalize_rows(latent);
  Var pg = ops::l2_normalize_rows(project_latent(tape, p, latent));
  Var pm = ops::l2_normalize_rows(project_motif(tape, p, motif));
  Var graph_term = ops::cross_entropy_sum(
      ops::scale(ops::matmul_nt(z, pg), 1.0 / temperature), diagonal);
  Var motif_term = ops::cross_entropy_sum(
      ops::scale(ops::matmul_nt(w, pm), 1.0 / temperature), diagonal);
  return ops::scale(ops::add(graph_term, motif_term), 0.5 / b);
}

AlignResult align_projectors(const Matrix &motif_globals, const Matrix &latents,
                             const AlignConfig &config,
                             const EditProjectors *init) {
  const int n = motif_globals.rows();
  if (latents.rows() != n || n < 2 || config.batch_size < 2)
    throw std::invalid_argument("alignment: batch size must be >= 2");
  AlignResult result;
  result.projectors =
      init != nullptr ? *init
                      : init_projectors(latents.cols(), motif_globals.cols(),
                                        config.seed);
  std::vector<Parameter> &params = result.projectors.params;
  AdamConfig adam_cfg;
  adam_cfg.learning_rates.fill(config.learning_rate);
  Adam adam(params, adam_cfg);
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto gather = [](const Matrix &m, std::span<const int> rows) {
    Matrix out(static_cast<int>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
      std::copy(m.row(rows[r]).begin(), m.row(rows[r]).end(),
                out.row(static_cast<int>(r)).begin());
    return out;
  };
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    int batches = 0;
    for (int start = 0; start + 2 <= n; start += config.batch_size) {
      const int end = std::min(n, start + config.batch_size);
      if (end - start < 2)
        break;
      std::span<const int> rows(order.data() + start, end - start);
      Tape tape;
      Var loss = alignment_loss(tape, result.projectors,
                                tape.constant(gather(motif_globals, rows)),
                                tape.constant(gather(latents, rows)),
                                config.temperature);
      tape.backward(loss);
      adam.step(params, tape);
      total += loss.item();
      ++batches;
    }
    result.epoch_losses.push_back(total / batches);
  }
  return result;
}

AlignResult align_to_model(const Model &model, const MotifVocab &vocab,
                           const Generator &generator,
                           std::span<const MolecularGraph> molecules,
                           const AlignConfig &config) {
  const int n = static_cast<int>(molecules.size());
  Matrix globals(n, model.config().fusion.width);
  Matrix latents(n, generator.latent_width());
  for (int i = 0; i < n; ++i) {
    const auto z = embed_pairless(model, tokenize_molecule(molecules[i], vocab));
    const auto w = generator.encode(molecules[i]);
    std::copy(z.begin(), z.end(), globals.row(i).begin());
    std::copy(w.begin(), w.end(), latents.row(i).begin());
  }
  return align_projectors(globals, latents, config);
}

namespace {

// cos(p_g(w), prompt) and its gradient with respect to w.
double prompt_cosine(const EditProjectors &p, std::span<const double> w,
                     std::span<const double> prompt,
                     std::vector<double> *grad) {
  Tape tape(grad != nullptr);
  Parameter latent{"edit.latent", ParamGroup::kProjector,
                   Matrix::row_vector(w)};
  Var pg = ops::l2_normalize_rows(project_latent(tape, p, tape.param(latent)));
  Var t = ops::l2_normalize_rows(tape.constant(Matrix::row_vector(prompt)));
  Var cos = ops::matmul_nt(pg, t);
  if (grad != nullptr) {
    tape.backward(cos);
    const Matrix *g = tape.gradient(latent);
    grad->assign(g->values().begin(), g->values().end());
  }
  return cos.item();
}

}  // namespace

EditResult edit_molecule(const MolecularGraph &molecule,
                         std::span<const double> prompt_embedding,
                         const Generator &generator,
                         const EditProjectors &projectors,
                         const EditConfig &config) {
  if (config.steps < 1)
    throw std::invalid_argument("edit: steps must be >= 1");
  if (!(config.anchor_weight >= 0) || !(config.temperature > 0) ||
      !(config.step_size > 0))
    throw std::invalid_argument("edit: invalid configuration");
  EditResult r;
  r.initial_latent = generator.encode(molecule);
  const std::vector<double> &w0 = r.initial_latent;
  std::vector<double> w = w0, grad;
  r.initial_cosine = prompt_cosine(projectors, w, prompt_embedding, nullptr);
  const double eta = config.step_size;
  const double shrink = 1.0 / (1.0 + 2.0 * eta * config.anchor_weight);
  for (int step = 0; step < config.steps; ++step) {
    prompt_cosine(projectors, w, prompt_embedding, &grad);
    for (std::size_t k = 0; k < w.size(); ++k) {
      // Gradient step on -cos/temperature, then the exact proximal step of
      // the squared anchor term.
      const double v = w[k] + eta * grad[k] / config.temperature;
      w[k] = (v + 2.0 * eta * config.anchor_weight * w0[k]) * shrink;
      if (!std::isfinite(w[k]))
        throw std::runtime_error("edit: non-finite latent");
    }
  }
  r.final_cosine = prompt_cosine(projectors, w, prompt_embedding, nullptr);
  r.latent = std::move(w);
  r.molecule = generator.decode(r.latent);
  return r;
}

double hit_ratio(std::span<const MolecularGraph> molecules,
                 const MolecularGraph &motif) {
  if (molecules.empty())
    throw std::invalid_argument("hit_ratio: empty set");
  int hits = 0;
  for (const MolecularGraph &m : molecules)
    hits += contains_motif(m, motif);
  return static_cast<double>(hits) / molecules.size();
}

}  // namespace moltext
