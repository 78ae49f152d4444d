//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_SRC_KERNELS_INTERNAL_H_
#define MOLTEXT_SRC_KERNELS_INTERNAL_H_

namespace moltext {
namespace internal {

double dot_scalar(const double *x, const double *y, int n);
void axpy_scalar(double alpha, const double *x, double *y, int n);
void gemm_nn_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc);
void gemm_nt_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc);
void gemm_tn_scalar(int m, int n, int k, const double *a, int lda,
                    const double *b, int ldb, double *c, int ldc);

#ifdef MOLTEXT_HAVE_AVX2
double dot_avx2(const double *x, const double *y, int n);
void axpy_avx2(double alpha, const double *x, double *y, int n);
void gemm_nn_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
void gemm_nt_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
void gemm_tn_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc);
#endif

}  // namespace internal
}  // namespace moltext

#endif  // MOLTEXT_SRC_KERNELS_INTERNAL_H_
