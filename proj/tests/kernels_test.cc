//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/kernels.h"

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

namespace moltext {
namespace {

std::vector<double> random_vector(std::mt19937_64 &rng, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double &x : v)
    x = dist(rng);
  return v;
}

void expect_close(const std::vector<double> &a, const std::vector<double> &b,
                  double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], tol * (1.0 + std::abs(a[i]))) << "index " << i;
}

class SimdEquivalenceTest : public ::testing::Test {
protected:
  void SetUp() override {
    simd_ = avx2_kernels();
    if (simd_ == nullptr)
      GTEST_SKIP() << "AVX2+FMA not available on this host";
  }
  const KernelTable *simd_ = nullptr;
  const KernelTable &ref_ = scalar_kernels();
};

TEST_F(SimdEquivalenceTest, DotAndAxpyMatchReferenceOnAllTails) {
  std::mt19937_64 rng(7);
  for (int n = 0; n <= 37; ++n) {
    auto x = random_vector(rng, n), y = random_vector(rng, n);
    EXPECT_NEAR(ref_.dot(x.data(), y.data(), n),
                simd_->dot(x.data(), y.data(), n), 1e-13);
    auto y_ref = y, y_simd = y;
    ref_.axpy(0.37, x.data(), y_ref.data(), n);
    simd_->axpy(0.37, x.data(), y_simd.data(), n);
    expect_close(y_ref, y_simd, 1e-14);
  }
}

TEST_F(SimdEquivalenceTest, GemmVariantsMatchReference) {
  std::mt19937_64 rng(11);
  const std::vector<std::tuple<int, int, int>> shapes = {
      {1, 1, 1},   {3, 5, 7},    {4, 8, 16},  {5, 13, 9},
      {9, 128, 64}, {17, 33, 128}, {2, 512, 128}, {7, 3, 1}};
  for (auto [m, n, k] : shapes) {
    // nn: A m x k, B k x n
    auto a = random_vector(rng, m * k), b = random_vector(rng, k * n);
    auto c0 = random_vector(rng, m * n);
    auto c_ref = c0, c_simd = c0;
    ref_.gemm_nn(m, n, k, a.data(), k, b.data(), n, c_ref.data(), n);
    simd_->gemm_nn(m, n, k, a.data(), k, b.data(), n, c_simd.data(), n);
    expect_close(c_ref, c_simd, 1e-12);

    // nt: B stored n x k
    auto bt = random_vector(rng, n * k);
    c_ref = c0;
    c_simd = c0;
    ref_.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c_ref.data(), n);
    simd_->gemm_nt(m, n, k, a.data(), k, bt.data(), k, c_simd.data(), n);
    expect_close(c_ref, c_simd, 1e-12);

    // tn: A stored k x m
    auto at = random_vector(rng, k * m);
    c_ref = c0;
    c_simd = c0;
    ref_.gemm_tn(m, n, k, at.data(), m, b.data(), n, c_ref.data(), n);
    simd_->gemm_tn(m, n, k, at.data(), m, b.data(), n, c_simd.data(), n);
    expect_close(c_ref, c_simd, 1e-12);
  }
}

TEST(KernelDispatchTest, SelectionRoundTrips) {
  const KernelIsa before = kernels().isa;
  ASSERT_TRUE(select_kernels(KernelIsa::kScalar));
  EXPECT_EQ(kernels().isa, KernelIsa::kScalar);
  EXPECT_EQ(isa_name(KernelIsa::kScalar), "scalar");
  if (avx2_kernels() != nullptr) {
    ASSERT_TRUE(select_kernels(KernelIsa::kAvx2));
    EXPECT_EQ(kernels().isa, KernelIsa::kAvx2);
  } else {
    EXPECT_FALSE(select_kernels(KernelIsa::kAvx2));
  }
  select_kernels(before);
  EXPECT_EQ(best_supported_isa(),
            avx2_kernels() ? KernelIsa::kAvx2 : KernelIsa::kScalar);
}

TEST(KernelReferenceTest, GemmKnownValues) {
  const KernelTable &k = scalar_kernels();
  const double a[] = {1, 2, 3, 4};  // 2x2
  const double b[] = {5, 6, 7, 8};
  double c[4] = {0, 0, 0, 0};
  k.gemm_nn(2, 2, 2, a, 2, b, 2, c, 2);
  EXPECT_EQ(c[0], 19);
  EXPECT_EQ(c[1], 22);
  EXPECT_EQ(c[2], 43);
  EXPECT_EQ(c[3], 50);
}

}  // namespace
}  // namespace moltext
