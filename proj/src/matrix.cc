//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/matrix.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "moltext/kernels.h"

namespace moltext {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0)
    throw std::invalid_argument("negative matrix dimension");
}

Matrix::Matrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows < 0 || cols < 0 ||
      data_.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("matrix value count does not match shape");
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Matrix m(r, c);
  int i = 0;
  for (const auto &row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument("ragged initializer");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, static_cast<int>(values.size()),
                std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

void gemm_accumulate(const Matrix &a, bool transpose_a, const Matrix &b,
                     bool transpose_b, Matrix &c) {
  const int m = transpose_a ? a.cols() : a.rows();
  const int k = transpose_a ? a.rows() : a.cols();
  const int kb = transpose_b ? b.cols() : b.rows();
  const int n = transpose_b ? b.rows() : b.cols();
  if (k != kb || c.rows() != m || c.cols() != n)
    throw std::invalid_argument("gemm shape mismatch");
  if (m == 0 || n == 0 || k == 0)
    return;
  if (transpose_a && transpose_b)
    throw std::invalid_argument("gemm: double transpose unsupported");

  const KernelTable &kt = kernels();
  if (transpose_a) {
    kt.gemm_tn(m, n, k, a.data(), a.cols(), b.data(), b.cols(), c.data(),
               c.cols());
  } else if (transpose_b) {
    kt.gemm_nt(m, n, k, a.data(), a.cols(), b.data(), b.cols(), c.data(),
               c.cols());
  } else {
    kt.gemm_nn(m, n, k, a.data(), a.cols(), b.data(), b.cols(), c.data(),
               c.cols());
  }
}

Matrix matmul(const Matrix &a, const Matrix &b) {
  Matrix c(a.rows(), b.cols());
  gemm_accumulate(a, false, b, false, c);
  return c;
}

void axpy(double alpha, const Matrix &x, Matrix &y) {
  if (!x.same_shape(y))
    throw std::invalid_argument("axpy shape mismatch");
  kernels().axpy(alpha, x.data(), y.data(), static_cast<int>(x.size()));
}

double cosine_similarity(std::span<const double> x,
                         std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("cosine: length mismatch");
  const KernelTable &kt = kernels();
  const int n = static_cast<int>(x.size());
  const double xy = kt.dot(x.data(), y.data(), n);
  const double xx = kt.dot(x.data(), x.data(), n);
  const double yy = kt.dot(y.data(), y.data(), n);
  const double denom = std::sqrt(xx) * std::sqrt(yy);
  return denom > 0 ? xy / denom : 0.0;
}

}  // namespace moltext
