//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace moltext {

Adam::Adam(const std::vector<Parameter> &params, const AdamConfig &config)
    : config_(config) {
  for (double lr : config_.learning_rates)
    if (!(lr >= 0) || !std::isfinite(lr))
      throw std::invalid_argument("learning rates must be finite and >= 0");
  for (const Parameter &p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void Adam::step(std::vector<Parameter> &params, const Tape &tape) {
  if (params.size() != m_.size())
    throw std::logic_error("Adam: parameter list changed");
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, steps_);
  const double c2 = 1.0 - std::pow(b2, steps_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix *g = tape.gradient(params[i]);
    if (g == nullptr)
      continue;
    const double lr = config_.learning_rates[static_cast<int>(params[i].group)];
    auto x = params[i].value.values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    auto gv = g->values();
    for (std::size_t k = 0; k < x.size(); ++k) {
      m[k] = b1 * m[k] + (1 - b1) * gv[k];
      v[k] = b2 * v[k] + (1 - b2) * gv[k] * gv[k];
      if (lr != 0.0)
        x[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
    }
  }
}

}  // namespace moltext
