//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_KERNELS_H_
#define MOLTEXT_KERNELS_H_

#include <string_view>

namespace moltext {

enum class KernelIsa {
  kScalar,
  kAvx2,
};

std::string_view isa_name(KernelIsa isa);

// Dense double-precision kernels over row-major storage. All gemm variants
// accumulate into C (C += op(A) op(B)); callers zero C when needed.
//
//   gemm_nn: C[m x n] += A[m x k]   * B[k x n]
//   gemm_nt: C[m x n] += A[m x k]   * B[n x k]^T
//   gemm_tn: C[m x n] += A[k x m]^T * B[k x n]
struct KernelTable {
  KernelIsa isa;

  double (*dot)(const double *x, const double *y, int n);
  void (*axpy)(double alpha, const double *x, double *y, int n);

  void (*gemm_nn)(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
  void (*gemm_nt)(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
  void (*gemm_tn)(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
};

const KernelTable &scalar_kernels();

// nullptr when the binary or the host lacks AVX2+FMA.
const KernelTable *avx2_kernels();

KernelIsa best_supported_isa();

// The table used by all numeric code. Selected once at startup from
// best_supported_isa(); may be overridden (e.g. to force the reference path).
const KernelTable &kernels();

// Returns false (and leaves the selection untouched) if `isa` is unavailable.
bool select_kernels(KernelIsa isa);

}  // namespace moltext

#endif  // MOLTEXT_KERNELS_H_
