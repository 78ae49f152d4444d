//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/autograd.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"

namespace moltext {
namespace {

using testing::check_gradients;
using testing::random_parameter;

constexpr double kTol = 1e-6;

TEST(AutogradTest, MatmulVariantsAndElementwise) {
  std::mt19937_64 rng(1);
  Parameter a = random_parameter("a", 3, 4, rng);
  Parameter b = random_parameter("b", 4, 5, rng);
  Parameter c = random_parameter("c", 5, 4, rng);
  Parameter r = random_parameter("r", 1, 5, rng);
  auto res = check_gradients({&a, &b, &c, &r}, [&](Tape &t) {
    Var ab = ops::matmul(t.param(a), t.param(b));      // 3x5
    Var x = ops::add_row(ab, t.param(r));
    Var y = ops::gelu(ops::scale(x, 0.7));
    Var z = ops::matmul(y, t.param(c));                // 3x4
    Var zt = ops::matmul_nt(t.param(a), t.param(c));   // 3x5
    Var w = ops::sub(z, ops::matmul(zt, t.param(c)));  // 3x4
    return ops::sum(ops::add(w, ops::gelu(w)));
  }, 1.0, 3);
  EXPECT_LT(res.max_relative_error, kTol) << res.worst;
}

TEST(AutogradTest, LayerNormAttentionAndPooling) {
  std::mt19937_64 rng(2);
  Parameter x = random_parameter("x", 4, 8, rng);
  Parameter mem = random_parameter("mem", 3, 8, rng);
  Parameter gain = random_parameter("gain", 1, 8, rng);
  Parameter shift = random_parameter("shift", 1, 8, rng);
  Parameter wq = random_parameter("wq", 8, 8, rng, 0.4);
  auto res = check_gradients({&x, &mem, &gain, &shift, &wq}, [&](Tape &t) {
    Var h = ops::layer_norm(t.param(x), t.param(gain), t.param(shift));
    Var q = ops::matmul(h, t.param(wq));
    Var att = ops::attention(q, t.param(mem), ops::gelu(t.param(mem)), 2);
    Var self = ops::attention(att, att, att, 4);
    Var pooled = ops::mean_rows(self);
    return ops::add(ops::squared_norm(pooled), ops::sum(ops::scale(self, 0.1)));
  }, 1.0, 4);
  EXPECT_LT(res.max_relative_error, kTol) << res.worst;
}

TEST(AutogradTest, GatherConcatSliceNormalizeCrossEntropy) {
  std::mt19937_64 rng(3);
  Parameter table = random_parameter("table", 6, 5, rng);
  Parameter extra = random_parameter("extra", 2, 5, rng);
  Parameter w = random_parameter("w", 5, 4, rng);
  const std::vector<int> ids = {1, 4, 1, 0};
  const std::vector<int> labels = {3, 0, 2, 1, 1, 0};
  auto res = check_gradients({&table, &extra, &w}, [&](Tape &t) {
    Var g = ops::gather_rows(t.param(table), ids);
    const Var parts[] = {g, t.param(extra)};
    Var all = ops::concat_rows(parts);
    Var normed = ops::l2_normalize_rows(all);
    Var logits = ops::scale(ops::matmul(normed, t.param(w)), 3.0);
    Var ce = ops::cross_entropy_sum(logits, labels);
    Var s = ops::slice_rows(all, 1, 3);
    return ops::add(ce, ops::squared_norm(s));
  }, 1.0, 5);
  EXPECT_LT(res.max_relative_error, kTol) << res.worst;
}

TEST(AutogradTest, SingleKeyAttentionReturnsValueRow) {
  Tape t(false);
  Var q = t.constant(Matrix::from_rows({{1, 2, 3, 4}, {-1, 0, 5, 2}}));
  Var k = t.constant(Matrix::from_rows({{0.5, 0.5, 0.5, 0.5}}));
  Var v = t.constant(Matrix::from_rows({{9, 8, 7, 6}}));
  Var out = ops::attention(q, k, v, 2);
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 4; ++c)
      EXPECT_DOUBLE_EQ(out.value()(i, c), v.value()(0, c));
}

TEST(AutogradTest, IdenticalKeysAverageValues) {
  Tape t(false);
  Var q = t.constant(Matrix::from_rows({{1, -2}, {3, 0.5}}));
  Var k = t.constant(Matrix::from_rows({{1, 1}, {1, 1}, {1, 1}}));
  Var v = t.constant(Matrix::from_rows({{1, 2}, {3, 4}, {5, 9}}));
  Var out = ops::attention(q, k, v, 1);
  EXPECT_NEAR(out.value()(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(out.value()(1, 1), 5.0, 1e-12);
}

TEST(AutogradTest, CrossEntropyUniformLogitsIsLogClasses) {
  Tape t(false);
  Var logits = t.constant(Matrix(2, 4, 0.25));
  const int labels[] = {0, 3};
  EXPECT_NEAR(ops::cross_entropy_sum(logits, labels).item(), 2 * std::log(4.0),
              1e-12);
}

TEST(AutogradTest, RepeatedParamSharesLeafAndAccumulates) {
  Parameter p{"p", ParamGroup::kFusion, Matrix::from_rows({{2.0}})};
  Tape t;
  Var a = t.param(p);
  Var b = t.param(p);
  EXPECT_EQ(a.id(), b.id());
  t.backward(ops::add(ops::squared_norm(a), ops::scale(b, 3.0)));
  ASSERT_NE(t.gradient(p), nullptr);
  EXPECT_DOUBLE_EQ((*t.gradient(p))(0, 0), 2 * 2.0 + 3.0);
}

TEST(AutogradTest, ErrorsOnShapeAndRangeViolations) {
  Tape t;
  Var a = t.constant(Matrix(2, 3));
  Var b = t.constant(Matrix(2, 3));
  EXPECT_THROW(ops::matmul(a, b), std::invalid_argument);
  const int bad[] = {5};
  EXPECT_THROW(ops::gather_rows(a, bad), std::out_of_range);
  Var empty = t.constant(Matrix(0, 3));
  EXPECT_THROW(ops::attention(a, empty, empty, 1), std::invalid_argument);
  EXPECT_THROW(ops::mean_rows(empty), std::invalid_argument);
}

}  // namespace
}  // namespace moltext
