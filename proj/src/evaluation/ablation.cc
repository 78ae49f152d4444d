//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <stdexcept>
#include <string>

#include "moltext/evaluation.h"

namespace moltext {

AblationKind parse_ablation(std::string_view name) {
  for (AblationKind k :
       {AblationKind::kFull, AblationKind::kWithoutMmm,
        AblationKind::kMotifMaskOnly, AblationKind::kWordMaskOnly,
        AblationKind::kWithoutCrossAttention})
    if (name == ablation_name(k))
      return k;
  throw std::invalid_argument("unknown ablation \"" + std::string(name) + "\"");
}

const char *ablation_name(AblationKind kind) {
  switch (kind) {
  case AblationKind::kFull:
    return "full";
  case AblationKind::kWithoutMmm:
    return "w/o-mmm";
  case AblationKind::kMotifMaskOnly:
    return "motif-mask-only";
  case AblationKind::kWordMaskOnly:
    return "word-mask-only";
  case AblationKind::kWithoutCrossAttention:
    return "w/o-cross-attention";
  }
  return "unknown";
}

TrainConfig build_ablation_variant(TrainConfig base, AblationKind kind) {
  switch (kind) {
  case AblationKind::kFull:
    break;
  case AblationKind::kWithoutMmm:
    base.mask_rates = {0.0, 0.0};
    base.loss.alpha = base.loss.beta = 0.0;
    break;
  case AblationKind::kMotifMaskOnly:
    base.mask_rates.word = 0.0;
    break;
  case AblationKind::kWordMaskOnly:
    base.mask_rates.motif = 0.0;
    break;
  case AblationKind::kWithoutCrossAttention:
    base.model.fusion.cross_attention = false;
    break;
  }
  return base;
}

}  // namespace moltext
