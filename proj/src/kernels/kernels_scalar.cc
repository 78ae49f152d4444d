//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "kernels_internal.h"

namespace moltext {
namespace internal {

double dot_scalar(const double *x, const double *y, int n) {
  double sum = 0;
  for (int i = 0; i < n; ++i)
    sum += x[i] * y[i];
  return sum;
}

void axpy_scalar(double alpha, const double *x, double *y, int n) {
  for (int i = 0; i < n; ++i)
    y[i] += alpha * x[i];
}

void gemm_nn_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0;
      for (int p = 0; p < k; ++p)
        sum += a[i * lda + p] * b[p * ldb + j];
      c[i * ldc + j] += sum;
    }
  }
}

void gemm_nt_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0;
      for (int p = 0; p < k; ++p)
        sum += a[i * lda + p] * b[j * ldb + p];
      c[i * ldc + j] += sum;
    }
  }
}

void gemm_tn_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0;
      for (int p = 0; p < k; ++p)
        sum += a[p * lda + i] * b[p * ldb + j];
      c[i * ldc + j] += sum;
    }
  }
}

}  // namespace internal
}  // namespace moltext
