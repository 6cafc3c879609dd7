#include "trihet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trihet/kernels.hpp"

namespace trihet::ad {

Var Tape::push(Matrix value, bool requires_grad, Adjoint adjoint) {
  if (consumed_) throw std::logic_error("cannot record on a tape that was already replayed");
  nodes_.push_back({std::move(value), Matrix(), requires_grad, std::move(adjoint)});
  return {nodes_.size() - 1};
}

Matrix Tape::grad(Var v) const {
  const auto& n = nodes_.at(v.id);
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Matrix& Tape::grad_slot(Var v) {
  auto& n = nodes_[v.id];
  if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(Var v, const Matrix& delta) {
  if (!nodes_[v.id].requires_grad) return;
  auto& g = grad_slot(v);
  if (!g.same_shape(delta)) throw std::logic_error("gradient shape mismatch");
  auto dst = g.values();
  auto src = delta.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void Tape::backward(Var target) {
  if (consumed_) throw std::logic_error("stale tape: backward() already ran on this tape");
  if (target.id >= nodes_.size()) throw std::out_of_range("backward target not on tape");
  if (nodes_[target.id].value.size() != 1) throw std::invalid_argument("backward target must be a scalar");
  consumed_ = true;
  grad_slot(target).fill(1.0);
  for (std::size_t id = target.id + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (!n.requires_grad || !n.adjoint || n.grad.empty()) continue;
    n.adjoint(*this, n.grad);
  }
}

double softplus(double x) {
  if (x > 20.0) return x;
  if (x < -20.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double mish(double x) { return x * std::tanh(softplus(x)); }

double mish_derivative(double x) {
  const double t = std::tanh(softplus(x));
  return t + x * (1.0 - t * t) * sigmoid(x);
}

namespace {

template <class F>
Matrix map(const Matrix& x, F f) {
  Matrix out(x.rows(), x.cols());
  auto src = x.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

Var matmul(Tape& t, Var a, Var b) {
  Matrix out;
  kernels::gemm(t.value(a), t.value(b), out);
  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  return t.push(std::move(out), rg, [a, b](Tape& tp, const Matrix& g) {
    Matrix tmp;
    if (tp.requires_grad(a)) {
      kernels::gemm_nt(g, tp.value(b), tmp);
      tp.accumulate(a, tmp);
    }
    if (tp.requires_grad(b)) {
      kernels::gemm_tn(tp.value(a), g, tmp);
      tp.accumulate(b, tmp);
    }
  });
}

Var add_row_bias(Tape& t, Var x, Var bias) {
  const Matrix& xv = t.value(x);
  const Matrix& bv = t.value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw std::invalid_argument("add_row_bias: shape mismatch");
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv(0, c);
  }
  const bool rg = t.requires_grad(x) || t.requires_grad(bias);
  return t.push(std::move(out), rg, [x, bias](Tape& tp, const Matrix& g) {
    tp.accumulate(x, g);
    if (tp.requires_grad(bias)) {
      Matrix sums(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) sums(0, c) += g(r, c);
      }
      tp.accumulate(bias, sums);
    }
  });
}

Var relu(Tape& t, Var x) {
  Matrix out = map(t.value(x), [](double v) { return v > 0.0 ? v : 0.0; });
  return t.push(std::move(out), t.requires_grad(x), [x](Tape& tp, const Matrix& g) {
    const auto xv = tp.value(x).values();
    auto& gx = tp.grad_slot(x);
    auto dst = gx.values();
    auto src = g.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (xv[i] > 0.0) dst[i] += src[i];
    }
  });
}

Var mish(Tape& t, Var x) {
  Matrix out = map(t.value(x), [](double v) { return mish(v); });
  return t.push(std::move(out), t.requires_grad(x), [x](Tape& tp, const Matrix& g) {
    const auto xv = tp.value(x).values();
    auto dst = tp.grad_slot(x).values();
    auto src = g.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * mish_derivative(xv[i]);
  });
}

Var dropout(Tape& t, Var x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must lie in [0, 1)");
  if (rate == 0.0) return x;
  const Matrix& xv = t.value(x);
  const double scale = 1.0 / (1.0 - rate);
  Matrix mask(xv.rows(), xv.cols());
  for (double& m : mask.values()) m = rng.uniform() >= rate ? scale : 0.0;
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = xv.values()[i] * mask.values()[i];
  return t.push(std::move(out), t.requires_grad(x), [x, mask = std::move(mask)](Tape& tp, const Matrix& g) {
    auto dst = tp.grad_slot(x).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g.values()[i] * mask.values()[i];
  });
}

Var sparse_matmul(Tape& t, const CsrMatrix& x, const CsrMatrix& xt, Var w) {
  Matrix out;
  kernels::spmm(CsrView::of(x), t.value(w), out);
  return t.push(std::move(out), t.requires_grad(w), [&xt, w](Tape& tp, const Matrix& g) {
    Matrix tmp;
    kernels::spmm(CsrView::of(xt), g, tmp);
    tp.accumulate(w, tmp);
  });
}

Var pair_hadamard(Tape& t, Var h, std::span<const NodePair> pairs) {
  const Matrix& hv = t.value(h);
  const std::size_t d = hv.cols();
  Matrix out(pairs.size(), d);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto a = hv.row(pairs[p].u);
    const auto b = hv.row(pairs[p].v);
    auto o = out.row(p);
    for (std::size_t c = 0; c < d; ++c) o[c] = a[c] * b[c];
  }
  std::vector<NodePair> kept(pairs.begin(), pairs.end());
  return t.push(std::move(out), t.requires_grad(h), [h, kept = std::move(kept)](Tape& tp, const Matrix& g) {
    const Matrix& hv2 = tp.value(h);
    Matrix& gh = tp.grad_slot(h);
    for (std::size_t p = 0; p < kept.size(); ++p) {
      const auto gr = g.row(p);
      const auto a = hv2.row(kept[p].u);
      const auto b = hv2.row(kept[p].v);
      auto ga = gh.row(kept[p].u);
      for (std::size_t c = 0; c < gr.size(); ++c) ga[c] += gr[c] * b[c];
      auto gb = gh.row(kept[p].v);
      for (std::size_t c = 0; c < gr.size(); ++c) gb[c] += gr[c] * a[c];
    }
  });
}

Var sigmoid_bce(Tape& t, Var logits, std::span<const int> labels) {
  const Matrix& z = t.value(logits);
  if (z.cols() != 1 || z.rows() != labels.size()) throw std::invalid_argument("sigmoid_bce: length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(sigmoid(z(i, 0)), kProbabilityFloor, 1.0 - kProbabilityFloor);
    loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  std::vector<int> y(labels.begin(), labels.end());
  return t.push(Matrix(1, 1, loss), t.requires_grad(logits), [logits, y = std::move(y)](Tape& tp, const Matrix& g) {
    const Matrix& zv = tp.value(logits);
    Matrix& gz = tp.grad_slot(logits);
    const double scale = g(0, 0);
    for (std::size_t i = 0; i < y.size(); ++i) gz(i, 0) += scale * (sigmoid(zv(i, 0)) - y[i]);
  });
}

}  // namespace trihet::ad
