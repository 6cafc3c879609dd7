#pragma once

// Reverse-mode differentiation over whole matrices. Each op appends a node
// holding its forward value plus an adjoint closure; Tape::backward replays
// the closures in reverse creation order, which is a reverse topological
// order because an op's inputs always precede it.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "trihet/graph.hpp"
#include "trihet/matrix.hpp"
#include "trihet/rng.hpp"

namespace trihet::ad {

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  using Adjoint = std::function<void(Tape&, const Matrix& grad_out)>;

  Var constant(Matrix value) { return push(std::move(value), false, {}); }
  Var leaf(Matrix value, bool requires_grad = true) { return push(std::move(value), requires_grad, {}); }
  Var push(Matrix value, bool requires_grad, Adjoint adjoint);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  /// Gradient of the last backward() target; zeros when the node was unreached.
  Matrix grad(Var v) const;

  /// Adds `delta` into the gradient slot of `v` (no-op for constants).
  void accumulate(Var v, const Matrix& delta);
  /// Direct access to v's gradient slot, allocated on first use.
  Matrix& grad_slot(Var v);

  /// Seeds d(target)/d(target) = 1 and propagates. A tape can be replayed once.
  void backward(Var target);
  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Adjoint adjoint;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

Var matmul(Tape& t, Var a, Var b);
/// x + broadcast of a 1 x n row vector.
Var add_row_bias(Tape& t, Var x, Var bias);
Var relu(Tape& t, Var x);
Var mish(Tape& t, Var x);
/// Inverted dropout: zeroes entries with probability `rate`, scales the rest
/// by 1 / (1 - rate). Identity when rate == 0.
Var dropout(Tape& t, Var x, double rate, Rng& rng);
/// X * W for a constant sparse X; `xt` is X transposed (used for the adjoint).
Var sparse_matmul(Tape& t, const CsrMatrix& x, const CsrMatrix& xt, Var w);
/// Row p = h[pairs[p].u] (elementwise *) h[pairs[p].v].
Var pair_hadamard(Tape& t, Var h, std::span<const NodePair> pairs);
/// Summed binary cross-entropy of sigmoid(logits) against 0/1 labels, with
/// probabilities clamped to [1e-12, 1 - 1e-12] in the value. The adjoint is
/// sigmoid(z) - y.
Var sigmoid_bce(Tape& t, Var logits, std::span<const int> labels);

double mish(double x);
double mish_derivative(double x);
double softplus(double x);
double sigmoid(double x);

inline constexpr double kProbabilityFloor = 1e-12;

}  // namespace trihet::ad
