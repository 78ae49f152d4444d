//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check.

#include <immintrin.h>

#include "kernels_internal.h"

namespace moltext {
namespace internal {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

// C[kRows x n] += A[kRows x k] * B[k x n], with A(r, p) = a[r * a_rs + p * a_cs].
template <int kRows>
void gemm_block(int n, int k, const double *a, int a_rs, int a_cs,
                const double *b, int ldb, double *c, int ldc) {
  int j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d acc[kRows][2];
    for (int r = 0; r < kRows; ++r) {
      acc[r][0] = _mm256_setzero_pd();
      acc[r][1] = _mm256_setzero_pd();
    }
    for (int p = 0; p < k; ++p) {
      const double *brow = b + p * ldb + j;
      __m256d b0 = _mm256_loadu_pd(brow);
      __m256d b1 = _mm256_loadu_pd(brow + 4);
      for (int r = 0; r < kRows; ++r) {
        __m256d av = _mm256_broadcast_sd(a + r * a_rs + p * a_cs);
        acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
        acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
      }
    }
    for (int r = 0; r < kRows; ++r) {
      double *crow = c + r * ldc + j;
      _mm256_storeu_pd(crow, _mm256_add_pd(_mm256_loadu_pd(crow), acc[r][0]));
      _mm256_storeu_pd(crow + 4,
                       _mm256_add_pd(_mm256_loadu_pd(crow + 4), acc[r][1]));
    }
  }
  for (; j + 4 <= n; j += 4) {
    __m256d acc[kRows];
    for (int r = 0; r < kRows; ++r)
      acc[r] = _mm256_setzero_pd();
    for (int p = 0; p < k; ++p) {
      __m256d bv = _mm256_loadu_pd(b + p * ldb + j);
      for (int r = 0; r < kRows; ++r) {
        __m256d av = _mm256_broadcast_sd(a + r * a_rs + p * a_cs);
        acc[r] = _mm256_fmadd_pd(av, bv, acc[r]);
      }
    }
    for (int r = 0; r < kRows; ++r) {
      double *crow = c + r * ldc + j;
      _mm256_storeu_pd(crow, _mm256_add_pd(_mm256_loadu_pd(crow), acc[r]));
    }
  }
  for (; j < n; ++j) {
    for (int r = 0; r < kRows; ++r) {
      double sum = 0;
      for (int p = 0; p < k; ++p)
        sum += a[r * a_rs + p * a_cs] * b[p * ldb + j];
      c[r * ldc + j] += sum;
    }
  }
}

void gemm_strided(int m, int n, int k, const double *a, int a_rs, int a_cs,
                  const double *b, int ldb, double *c, int ldc) {
  int i = 0;
  for (; i + 4 <= m; i += 4)
    gemm_block<4>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  for (; i < m; ++i)
    gemm_block<1>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
}

}  // namespace

double dot_avx2(const double *x, const double *y, int n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i)
    sum += x[i] * y[i];
  return sum;
}

void axpy_avx2(double alpha, const double *x, double *y, int n) {
  __m256d av = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i)
    y[i] += alpha * x[i];
}

void gemm_nn_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc) {
  gemm_strided(m, n, k, a, lda, 1, b, ldb, c, ldc);
}

void gemm_tn_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc) {
  gemm_strided(m, n, k, a, 1, lda, b, ldb, c, ldc);
}

void gemm_nt_avx2(int m, int n, int k, const double *a, int lda,
                  const double *b, int ldb, double *c, int ldc) {
  for (int i = 0; i < m; ++i) {
    const double *arow = a + i * lda;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      const double *b0 = b + j * ldb, *b1 = b0 + ldb, *b2 = b1 + ldb,
                   *b3 = b2 + ldb;
      __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd(),
              acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4) {
        __m256d av = _mm256_loadu_pd(arow + p);
        acc0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + p), acc0);
        acc1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + p), acc1);
        acc2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b2 + p), acc2);
        acc3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b3 + p), acc3);
      }
      double s0 = hsum(acc0), s1 = hsum(acc1), s2 = hsum(acc2),
             s3 = hsum(acc3);
      for (; p < k; ++p) {
        s0 += arow[p] * b0[p];
        s1 += arow[p] * b1[p];
        s2 += arow[p] * b2[p];
        s3 += arow[p] * b3[p];
      }
      double *crow = c + i * ldc + j;
      crow[0] += s0;
      crow[1] += s1;
      crow[2] += s2;
      crow[3] += s3;
    }
    for (; j < n; ++j)
      c[i * ldc + j] += dot_avx2(arow, b + j * ldb, k);
  }
}

}  // namespace internal
}  // namespace moltext
