//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "moltext/evaluation.h"
#include "moltext/fusion.h"
#include "moltext/objectives.h"

namespace moltext {

double masked_motif_probability(const Model &model, const MotifVocab &vocab,
                                const MotifSequence &motifs,
                                const TextSequence &text, int masked_slot,
                                std::span<const int> dropped) {
  if (masked_slot <= 0 || masked_slot >= motifs.length())
    throw std::out_of_range("attribution: masked slot out of range");
  const int cls = vocab.maskable_index(motifs.labels[masked_slot]);
  if (cls < 0)
    throw std::invalid_argument("attribution: masked motif is not maskable");
  MaskSpec mask;
  mask.motif.push_back({masked_slot, motifs.labels[masked_slot]});
  for (int s : dropped)
    mask.word.push_back({s, text.ids.at(s)});
  Tape tape(false);
  FusionOutput out = encode_pair(tape, model, motifs, text, mask);
  const int slot[] = {masked_slot};
  const Matrix logits = motif_logits(tape, model, out.h_motif, slot).value();
  const auto row = logits.row(0);
  const double top = *std::max_element(row.begin(), row.end());
  double z = 0;
  for (double v : row)
    z += std::exp(v - top);
  return std::exp(row[cls] - top) / z;
}

namespace {

class Surrogate {
public:
  Surrogate(const Model &model, const MotifVocab &vocab,
            const MotifSequence &motifs, const TextSequence &text,
            int masked_slot, double kernel_width)
      : model_(model), vocab_(vocab), motifs_(motifs), text_(text),
        slot_(masked_slot), width_(kernel_width),
        words_(text.length() - 1) {
    if (!(kernel_width > 0))
      throw std::invalid_argument("attribution: kernel width must be > 0");
  }

  int words() const { return words_; }

  // Bit i set = word slot i+1 kept.
  void add(std::uint32_t keep) {
    auto it = cache_.find(keep);
    if (it == cache_.end()) {
      std::vector<int> dropped;
      for (int i = 0; i < words_; ++i)
        if (!(keep >> i & 1u))
          dropped.push_back(i + 1);
      it = cache_
               .emplace(keep, masked_motif_probability(model_, vocab_, motifs_,
                                                       text_, slot_, dropped))
               .first;
    }
    patterns_.push_back(keep);
    outputs_.push_back(it->second);
  }

  WordImportance fit() const {
    const int n = static_cast<int>(patterns_.size());
    Eigen::MatrixXd a(n, words_ + 1);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
      const int dropped = words_ - std::popcount(patterns_[r]);
      const double dist = words_ > 0 ? double(dropped) / words_ : 0.0;
      const double w = std::sqrt(std::exp(-dist * dist / (width_ * width_)));
      a(r, 0) = w;
      for (int i = 0; i < words_; ++i)
        a(r, i + 1) = (patterns_[r] >> i & 1u) ? w : 0.0;
      b(r) = w * outputs_[r];
    }
    Eigen::VectorXd beta = a.completeOrthogonalDecomposition().solve(b);
    WordImportance out;
    out.intercept = beta(0);
    for (int i = 0; i < words_; ++i)
      out.weights.push_back(beta(i + 1));
    out.base_probability = cache_.at(full_mask());
    return out;
  }

  std::uint32_t full_mask() const {
    return words_ == 32 ? ~0u : ((1u << words_) - 1u);
  }

private:
  const Model &model_;
  const MotifVocab &vocab_;
  const MotifSequence &motifs_;
  const TextSequence &text_;
  int slot_;
  double width_;
  int words_;
  std::map<std::uint32_t, double> cache_;
  std::vector<std::uint32_t> patterns_;
  std::vector<double> outputs_;
};

}  // namespace

WordImportance word_importance(const Model &model, const MotifVocab &vocab,
                               const MotifSequence &motifs,
                               const TextSequence &text, int masked_slot,
                               const AttributionConfig &config) {
  Surrogate s(model, vocab, motifs, text, masked_slot, config.kernel_width);
  if (s.words() > 32)
    throw std::invalid_argument("attribution: text longer than 32 words");
  if (config.samples < 1)
    throw std::invalid_argument("attribution: samples must be >= 1");
  std::mt19937_64 rng(config.seed);
  std::bernoulli_distribution keep(0.5);
  s.add(s.full_mask());
  for (int i = 1; i < config.samples; ++i) {
    std::uint32_t pattern = 0;
    for (int w = 0; w < s.words(); ++w)
      if (keep(rng))
        pattern |= 1u << w;
    s.add(pattern);
  }
  return s.fit();
}

WordImportance word_importance_exhaustive(const Model &model,
                                          const MotifVocab &vocab,
                                          const MotifSequence &motifs,
                                          const TextSequence &text,
                                          int masked_slot,
                                          double kernel_width) {
  Surrogate s(model, vocab, motifs, text, masked_slot, kernel_width);
  if (s.words() > 16)
    throw std::invalid_argument("attribution: exhaustive mode needs <= 16 words");
  for (std::uint32_t p = 0; p <= s.full_mask(); ++p)
    s.add(p);
  return s.fit();
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]])
      ++j;
    for (std::size_t k = i; k < j; ++k)
      r[order[k]] = (i + j - 1) / 2.0;
    i = j;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length samples");
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0)
    return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace moltext
