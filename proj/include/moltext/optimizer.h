//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_OPTIMIZER_H_
#define MOLTEXT_OPTIMIZER_H_

#include <array>
#include <vector>

#include "moltext/autograd.h"

namespace moltext {

using GroupRates = std::array<double, kParamGroupCount>;

struct AdamConfig {
  GroupRates learning_rates = {1e-3, 1e-3, 1e-3, 1e-3, 1e-3};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with a learning rate per parameter group. Parameters that received no
// gradient on a tape are left untouched.
class Adam {
public:
  Adam(const std::vector<Parameter> &params, const AdamConfig &config);

  void step(std::vector<Parameter> &params, const Tape &tape);
  int steps() const { return steps_; }

private:
  AdamConfig config_;
  std::vector<Matrix> m_, v_;
  int steps_ = 0;
};

}  // namespace moltext

#endif  // MOLTEXT_OPTIMIZER_H_
