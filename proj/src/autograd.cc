//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/autograd.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "moltext/kernels.h"

namespace moltext {

const char *param_group_name(ParamGroup group) {
  switch (group) {
  case ParamGroup::kGraphEncoder:
    return "graph_encoder";
  case ParamGroup::kTextEncoder:
    return "text_encoder";
  case ParamGroup::kProjector:
    return "projector";
  case ParamGroup::kFusion:
    return "fusion";
  case ParamGroup::kClassifier:
    return "classifier";
  }
  return "unknown";
}

const Matrix &Var::value() const {
  const auto &n = tape_->node(*this);
  return n.external != nullptr ? *n.external : n.value;
}

double Var::item() const {
  const Matrix &m = value();
  if (m.rows() != 1 || m.cols() != 1)
    throw std::logic_error("item() on a non-scalar node");
  return m(0, 0);
}

const Tape::Node &Tape::node(Var v) const {
  if (v.tape_ != this || v.id_ < 0 ||
      v.id_ >= static_cast<int>(nodes_.size()))
    throw std::logic_error("variable does not belong to this tape");
  return nodes_[v.id_];
}

Tape::Node &Tape::node(Var v) {
  return const_cast<Node &>(std::as_const(*this).node(v));
}

Var Tape::constant(Matrix value) {
  Node &n = nodes_.emplace_back();
  n.value = std::move(value);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::param(const Parameter &parameter) {
  auto it = param_nodes_.find(&parameter);
  if (it != param_nodes_.end())
    return Var(this, it->second);
  Node &n = nodes_.emplace_back();
  n.external = &parameter.value;
  n.requires_grad = record_gradients_;
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&parameter, id);
  return Var(this, id);
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents,
                 BackwardFn fn) {
  return record(std::move(value),
                std::span<const Var>(parents.begin(), parents.size()),
                std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> parents, BackwardFn fn) {
  bool needs = false;
  if (record_gradients_) {
    for (const Var &p : parents)
      needs = needs || node(p).requires_grad;
  }
  Node &n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs)
    n.backward = std::move(fn);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix *Tape::grad_target(Var v) {
  Node &n = node(v);
  if (!n.requires_grad)
    return nullptr;
  if (n.grad.empty()) {
    const Matrix &val = n.external != nullptr ? *n.external : n.value;
    n.grad = Matrix(val.rows(), val.cols());
  }
  return &n.grad;
}

void Tape::backward(Var loss) {
  if (!record_gradients_)
    throw std::logic_error("backward on a tape that does not record gradients");
  if (loss.rows() != 1 || loss.cols() != 1)
    throw std::invalid_argument("backward requires a scalar loss");
  Matrix *seed = grad_target(loss);
  if (seed == nullptr)
    return;
  (*seed)(0, 0) += 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node &n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward)
      continue;
    n.backward(*this, n.grad);
  }
}

const Matrix *Tape::gradient(const Parameter &parameter) const {
  auto it = param_nodes_.find(&parameter);
  if (it == param_nodes_.end())
    return nullptr;
  const Node &n = nodes_[it->second];
  return n.grad.empty() ? nullptr : &n.grad;
}

const Matrix *Tape::gradient(Var v) const {
  const Node &n = node(v);
  return n.grad.empty() ? nullptr : &n.grad;
}

namespace ops {
namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw std::invalid_argument(what);
}

}  // namespace

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  Tape &t = *a.tape();
  Matrix out(a.rows(), b.cols());
  gemm_accumulate(a.value(), false, b.value(), false, out);
  return t.record(std::move(out), {a, b}, [a, b](Tape &t, const Matrix &g) {
    if (Matrix *ga = t.grad_target(a))
      gemm_accumulate(g, false, b.value(), true, *ga);
    if (Matrix *gb = t.grad_target(b))
      gemm_accumulate(a.value(), true, g, false, *gb);
  });
}

Var matmul_nt(Var a, Var b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimension mismatch");
  Tape &t = *a.tape();
  Matrix out(a.rows(), b.rows());
  gemm_accumulate(a.value(), false, b.value(), true, out);
  return t.record(std::move(out), {a, b}, [a, b](Tape &t, const Matrix &g) {
    if (Matrix *ga = t.grad_target(a))
      gemm_accumulate(g, false, b.value(), false, *ga);
    if (Matrix *gb = t.grad_target(b))
      gemm_accumulate(g, true, a.value(), false, *gb);
  });
}

Var add(Var a, Var b) {
  require(a.value().same_shape(b.value()), "add: shape mismatch");
  Matrix out = a.value();
  moltext::axpy(1.0, b.value(), out);
  return a.tape()->record(std::move(out), {a, b},
                          [a, b](Tape &t, const Matrix &g) {
                            if (Matrix *ga = t.grad_target(a))
                              moltext::axpy(1.0, g, *ga);
                            if (Matrix *gb = t.grad_target(b))
                              moltext::axpy(1.0, g, *gb);
                          });
}

Var sub(Var a, Var b) {
  require(a.value().same_shape(b.value()), "sub: shape mismatch");
  Matrix out = a.value();
  moltext::axpy(-1.0, b.value(), out);
  return a.tape()->record(std::move(out), {a, b},
                          [a, b](Tape &t, const Matrix &g) {
                            if (Matrix *ga = t.grad_target(a))
                              moltext::axpy(1.0, g, *ga);
                            if (Matrix *gb = t.grad_target(b))
                              moltext::axpy(-1.0, g, *gb);
                          });
}

Var add_row(Var a, Var row) {
  require(row.rows() == 1 && row.cols() == a.cols(), "add_row: shape mismatch");
  Matrix out = a.value();
  const KernelTable &kt = kernels();
  for (int r = 0; r < out.rows(); ++r)
    kt.axpy(1.0, row.value().data(), out.row(r).data(), out.cols());
  return a.tape()->record(std::move(out), {a, row},
                          [a, row](Tape &t, const Matrix &g) {
                            if (Matrix *ga = t.grad_target(a))
                              moltext::axpy(1.0, g, *ga);
                            if (Matrix *gr = t.grad_target(row)) {
                              const KernelTable &kt = kernels();
                              for (int r = 0; r < g.rows(); ++r)
                                kt.axpy(1.0, g.row(r).data(), gr->data(),
                                        g.cols());
                            }
                          });
}

Var scale(Var a, double factor) {
  Matrix out = a.value();
  for (double &x : out.values())
    x *= factor;
  return a.tape()->record(std::move(out), {a},
                          [a, factor](Tape &t, const Matrix &g) {
                            if (Matrix *ga = t.grad_target(a))
                              moltext::axpy(factor, g, *ga);
                          });
}

namespace {

constexpr double kGeluC = 0.044715;
const double kGeluK = std::sqrt(2.0 / std::numbers::pi);

}  // namespace

Var gelu(Var a) {
  Matrix out(a.rows(), a.cols());
  auto in = a.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double x = in[i];
    dst[i] = 0.5 * x * (1.0 + std::tanh(kGeluK * (x + kGeluC * x * x * x)));
  }
  return a.tape()->record(std::move(out), {a}, [a](Tape &t, const Matrix &g) {
    Matrix *ga = t.grad_target(a);
    if (ga == nullptr)
      return;
    auto in = a.value().values();
    auto gin = g.values();
    auto dst = ga->values();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double x = in[i];
      const double u = kGeluK * (x + kGeluC * x * x * x);
      const double th = std::tanh(u);
      const double du = kGeluK * (1.0 + 3.0 * kGeluC * x * x);
      const double d = 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
      dst[i] += gin[i] * d;
    }
  });
}

Var layer_norm(Var x, Var gain, Var shift, double eps) {
  const int rows = x.rows(), cols = x.cols();
  require(gain.rows() == 1 && gain.cols() == cols && shift.rows() == 1 &&
              shift.cols() == cols,
          "layer_norm: parameter shape mismatch");
  Matrix normalized(rows, cols);
  std::vector<double> inv_std(rows);
  Matrix out(rows, cols);
  const Matrix &xv = x.value();
  const Matrix &gv = gain.value();
  const Matrix &sv = shift.value();
  for (int r = 0; r < rows; ++r) {
    auto in = xv.row(r);
    double mean = 0;
    for (double v : in)
      mean += v;
    mean /= cols;
    double var = 0;
    for (double v : in)
      var += (v - mean) * (v - mean);
    var /= cols;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (int c = 0; c < cols; ++c) {
      normalized(r, c) = (in[c] - mean) * inv_std[r];
      out(r, c) = normalized(r, c) * gv(0, c) + sv(0, c);
    }
  }
  return x.tape()->record(
      std::move(out), {x, gain, shift},
      [x, gain, shift, normalized = std::move(normalized),
       inv_std = std::move(inv_std)](Tape &t, const Matrix &g) {
        const int rows = g.rows(), cols = g.cols();
        if (Matrix *gg = t.grad_target(gain)) {
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
              (*gg)(0, c) += g(r, c) * normalized(r, c);
        }
        if (Matrix *gs = t.grad_target(shift)) {
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
              (*gs)(0, c) += g(r, c);
        }
        Matrix *gx = t.grad_target(x);
        if (gx == nullptr)
          return;
        const Matrix &gv = gain.value();
        std::vector<double> dxhat(cols);
        for (int r = 0; r < rows; ++r) {
          double mean_d = 0, mean_dx = 0;
          for (int c = 0; c < cols; ++c) {
            dxhat[c] = g(r, c) * gv(0, c);
            mean_d += dxhat[c];
            mean_dx += dxhat[c] * normalized(r, c);
          }
          mean_d /= cols;
          mean_dx /= cols;
          for (int c = 0; c < cols; ++c) {
            (*gx)(r, c) +=
                inv_std[r] * (dxhat[c] - mean_d - normalized(r, c) * mean_dx);
          }
        }
      });
}

Var attention(Var q, Var k, Var v, int heads) {
  const int n = q.rows(), m = k.rows(), d = q.cols();
  require(m > 0, "attention: empty key/value sequence");
  require(k.cols() == d && v.cols() == d && v.rows() == m,
          "attention: shape mismatch");
  require(heads > 0 && d % heads == 0, "attention: width not divisible by heads");
  const int dk = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dk));
  const KernelTable &kt = kernels();

  // probs[h] is n x m.
  std::vector<Matrix> probs(heads, Matrix(n, m));
  Matrix out(n, d);
  const Matrix &qv = q.value(), &kv = k.value(), &vv = v.value();
  for (int h = 0; h < heads; ++h) {
    const int off = h * dk;
    Matrix &p = probs[h];
    for (int i = 0; i < n; ++i) {
      double max_s = -INFINITY;
      for (int j = 0; j < m; ++j) {
        p(i, j) =
            kt.dot(qv.row(i).data() + off, kv.row(j).data() + off, dk) *
            inv_sqrt;
        max_s = std::max(max_s, p(i, j));
      }
      double z = 0;
      for (int j = 0; j < m; ++j) {
        p(i, j) = std::exp(p(i, j) - max_s);
        z += p(i, j);
      }
      for (int j = 0; j < m; ++j) {
        p(i, j) /= z;
        kt.axpy(p(i, j), vv.row(j).data() + off, out.row(i).data() + off, dk);
      }
    }
  }
  return q.tape()->record(
      std::move(out), {q, k, v},
      [q, k, v, heads, dk, inv_sqrt,
       probs = std::move(probs)](Tape &t, const Matrix &g) {
        const int n = q.rows(), m = k.rows();
        const KernelTable &kt = kernels();
        Matrix *gq = t.grad_target(q);
        Matrix *gk = t.grad_target(k);
        Matrix *gv = t.grad_target(v);
        const Matrix &qv = q.value(), &kv = k.value(), &vv = v.value();
        std::vector<double> dp(m);
        for (int h = 0; h < heads; ++h) {
          const int off = h * dk;
          const Matrix &p = probs[h];
          for (int i = 0; i < n; ++i) {
            const double *gi = g.row(i).data() + off;
            double weighted = 0;
            for (int j = 0; j < m; ++j) {
              dp[j] = kt.dot(gi, vv.row(j).data() + off, dk);
              weighted += dp[j] * p(i, j);
              if (gv != nullptr)
                kt.axpy(p(i, j), gi, gv->row(j).data() + off, dk);
            }
            for (int j = 0; j < m; ++j) {
              const double ds = p(i, j) * (dp[j] - weighted) * inv_sqrt;
              if (gq != nullptr)
                kt.axpy(ds, kv.row(j).data() + off, gq->row(i).data() + off,
                        dk);
              if (gk != nullptr)
                kt.axpy(ds, qv.row(i).data() + off, gk->row(j).data() + off,
                        dk);
            }
          }
        }
      });
}

Var gather_rows(Var table, std::span<const int> ids) {
  const Matrix &tv = table.value();
  Matrix out(static_cast<int>(ids.size()), tv.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= tv.rows())
      throw std::out_of_range("gather_rows: id " + std::to_string(ids[r]) +
                              " outside table of " +
                              std::to_string(tv.rows()) + " rows");
    std::copy_n(tv.row(ids[r]).data(), tv.cols(),
                out.row(static_cast<int>(r)).data());
  }
  return table.tape()->record(
      std::move(out), {table},
      [table, ids = std::vector<int>(ids.begin(), ids.end())](
          Tape &t, const Matrix &g) {
        Matrix *gt = t.grad_target(table);
        if (gt == nullptr)
          return;
        const KernelTable &kt = kernels();
        for (std::size_t r = 0; r < ids.size(); ++r)
          kt.axpy(1.0, g.row(static_cast<int>(r)).data(),
                  gt->row(ids[r]).data(), g.cols());
      });
}

Var concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const int cols = parts.front().cols();
  int rows = 0;
  for (const Var &p : parts) {
    require(p.cols() == cols, "concat_rows: width mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  int at = 0;
  for (const Var &p : parts) {
    std::copy_n(p.value().data(), p.value().size(), out.row(at).data());
    at += p.rows();
  }
  return parts.front().tape()->record(
      std::move(out), parts,
      [parts = std::vector<Var>(parts.begin(), parts.end())](
          Tape &t, const Matrix &g) {
        int at = 0;
        for (const Var &p : parts) {
          if (Matrix *gp = t.grad_target(p)) {
            kernels().axpy(1.0, g.row(at).data(), gp->data(),
                           static_cast<int>(gp->size()));
          }
          at += p.rows();
        }
      });
}

Var slice_rows(Var a, int begin, int count) {
  require(begin >= 0 && count >= 0 && begin + count <= a.rows(),
          "slice_rows: range outside matrix");
  Matrix out(count, a.cols());
  if (count > 0)
    std::copy_n(a.value().row(begin).data(), out.size(), out.data());
  return a.tape()->record(std::move(out), {a},
                          [a, begin](Tape &t, const Matrix &g) {
                            Matrix *ga = t.grad_target(a);
                            if (ga == nullptr || g.empty())
                              return;
                            kernels().axpy(1.0, g.data(),
                                           ga->row(begin).data(),
                                           static_cast<int>(g.size()));
                          });
}

Var mean_rows(Var a) {
  require(a.rows() > 0, "mean_rows: empty input");
  const int rows = a.rows();
  Matrix out(1, a.cols());
  const KernelTable &kt = kernels();
  for (int r = 0; r < rows; ++r)
    kt.axpy(1.0, a.value().row(r).data(), out.data(), a.cols());
  for (double &x : out.values())
    x /= rows;
  return a.tape()->record(std::move(out), {a},
                          [a, rows](Tape &t, const Matrix &g) {
                            Matrix *ga = t.grad_target(a);
                            if (ga == nullptr)
                              return;
                            const KernelTable &kt = kernels();
                            for (int r = 0; r < rows; ++r)
                              kt.axpy(1.0 / rows, g.data(),
                                      ga->row(r).data(), g.cols());
                          });
}

Var l2_normalize_rows(Var a, double eps) {
  const int rows = a.rows(), cols = a.cols();
  Matrix out(rows, cols);
  std::vector<double> norms(rows);
  const KernelTable &kt = kernels();
  for (int r = 0; r < rows; ++r) {
    auto in = a.value().row(r);
    norms[r] = std::max(std::sqrt(kt.dot(in.data(), in.data(), cols)), eps);
    for (int c = 0; c < cols; ++c)
      out(r, c) = in[c] / norms[r];
  }
  Matrix saved = out;
  return a.tape()->record(
      std::move(out), {a},
      [a, norms = std::move(norms), y = std::move(saved)](Tape &t,
                                                          const Matrix &g) {
        Matrix *ga = t.grad_target(a);
        if (ga == nullptr)
          return;
        const KernelTable &kt = kernels();
        const int cols = g.cols();
        for (int r = 0; r < g.rows(); ++r) {
          const double proj = kt.dot(y.row(r).data(), g.row(r).data(), cols);
          for (int c = 0; c < cols; ++c)
            (*ga)(r, c) += (g(r, c) - y(r, c) * proj) / norms[r];
        }
      });
}

Var cross_entropy_sum(Var logits, std::span<const int> labels) {
  const int rows = logits.rows(), cols = logits.cols();
  require(static_cast<int>(labels.size()) == rows,
          "cross_entropy: label count mismatch");
  Matrix probs(rows, cols);
  double total = 0;
  for (int r = 0; r < rows; ++r) {
    if (labels[r] < 0 || labels[r] >= cols)
      throw std::out_of_range("cross_entropy: label " +
                              std::to_string(labels[r]) + " outside " +
                              std::to_string(cols) + " classes");
    auto in = logits.value().row(r);
    const double max_v = *std::max_element(in.begin(), in.end());
    double z = 0;
    for (int c = 0; c < cols; ++c) {
      probs(r, c) = std::exp(in[c] - max_v);
      z += probs(r, c);
    }
    for (int c = 0; c < cols; ++c)
      probs(r, c) /= z;
    total += -(in[labels[r]] - max_v - std::log(z));
  }
  Matrix out(1, 1, total);
  return logits.tape()->record(
      std::move(out), {logits},
      [logits, probs = std::move(probs),
       labels = std::vector<int>(labels.begin(), labels.end())](
          Tape &t, const Matrix &g) {
        Matrix *gl = t.grad_target(logits);
        if (gl == nullptr)
          return;
        const double scale = g(0, 0);
        for (int r = 0; r < probs.rows(); ++r) {
          for (int c = 0; c < probs.cols(); ++c)
            (*gl)(r, c) += scale * probs(r, c);
          (*gl)(r, labels[r]) -= scale;
        }
      });
}

Var sum(Var a) {
  double total = 0;
  for (double x : a.value().values())
    total += x;
  return a.tape()->record(Matrix(1, 1, total), {a},
                          [a](Tape &t, const Matrix &g) {
                            Matrix *ga = t.grad_target(a);
                            if (ga == nullptr)
                              return;
                            for (double &x : ga->values())
                              x += g(0, 0);
                          });
}

Var squared_norm(Var a) {
  double total = 0;
  for (double x : a.value().values())
    total += x * x;
  return a.tape()->record(Matrix(1, 1, total), {a},
                          [a](Tape &t, const Matrix &g) {
                            if (Matrix *ga = t.grad_target(a))
                              moltext::axpy(2.0 * g(0, 0), a.value(), *ga);
                          });
}

}  // namespace ops
}  // namespace moltext
