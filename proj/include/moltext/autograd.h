//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_AUTOGRAD_H_
#define MOLTEXT_AUTOGRAD_H_

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "moltext/matrix.h"

namespace moltext {

enum class ParamGroup {
  kGraphEncoder,
  kTextEncoder,
  kProjector,
  kFusion,
  kClassifier,
};

inline constexpr int kParamGroupCount = 5;

const char *param_group_name(ParamGroup group);

struct Parameter {
  std::string name;
  ParamGroup group = ParamGroup::kFusion;
  Matrix value;
};

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; valid for the lifetime
// of the tape that produced it.
class Var {
public:
  Var() = default;

  const Matrix &value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double item() const;

  Tape *tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

private:
  friend class Tape;
  Var(Tape *tape, int id) : tape_(tape), id_(id) {}

  Tape *tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode recording of matrix operations. Parameters enter as read-only
// leaves; their gradients are collected on the tape, so forward passes never
// mutate model state.
class Tape {
public:
  using BackwardFn = std::function<void(Tape &tape, const Matrix &out_grad)>;

  explicit Tape(bool record_gradients = true)
      : record_gradients_(record_gradients) {}
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var constant(Matrix value);
  // Repeated calls with the same parameter return the same leaf.
  Var param(const Parameter &parameter);

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void backward(Var loss);

  // nullptr if the parameter never reached the loss.
  const Matrix *gradient(const Parameter &parameter) const;
  const Matrix *gradient(Var v) const;

  bool requires_grad(Var v) const { return node(v).requires_grad; }
  bool recording() const { return record_gradients_; }
  std::size_t size() const { return nodes_.size(); }

  // Op construction.
  Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn fn);
  Var record(Matrix value, std::span<const Var> parents, BackwardFn fn);
  // Gradient buffer of `v`, or nullptr when `v` needs no gradient.
  Matrix *grad_target(Var v);

private:
  struct Node {
    Matrix value;
    const Matrix *external = nullptr;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  friend class Var;
  const Node &node(Var v) const;
  Node &node(Var v);

  bool record_gradients_;
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter *, int> param_nodes_;
};

namespace ops {

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
// Adds a 1 x n row to every row of `a`.
Var add_row(Var a, Var row);
Var scale(Var a, double factor);
Var gelu(Var a);
Var layer_norm(Var x, Var gain, Var shift, double eps = 1e-5);

// Multi-head scaled dot-product attention, softmax(Q K^T / sqrt(d_k)) V per
// head; heads split the columns evenly. q: n x d, k and v: m x d.
Var attention(Var q, Var k, Var v, int heads);

Var gather_rows(Var table, std::span<const int> ids);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, int begin, int count);
Var mean_rows(Var a);
Var l2_normalize_rows(Var a, double eps = 1e-12);

// Sum over rows of -log softmax(logits[i])[labels[i]].
Var cross_entropy_sum(Var logits, std::span<const int> labels);
Var sum(Var a);
Var squared_norm(Var a);

}  // namespace ops

}  // namespace moltext

#endif  // MOLTEXT_AUTOGRAD_H_
