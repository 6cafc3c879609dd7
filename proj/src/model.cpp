#include "trihet/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "trihet/kernels.hpp"

namespace trihet {

PhiOperator build_phi_static(const Graph& g) {
  const std::size_t n = g.num_nodes();
  PhiOperator op;
  op.num_nodes = n;
  op.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) op.offsets[i + 1] = op.offsets[i] + g.degree(static_cast<node_t>(i)) + 1;
  const std::size_t nnz = op.offsets[n];
  op.cols.resize(nnz);
  op.norm.resize(nnz);
  op.cn.assign(nnz, 0.0);
  op.hi.assign(nnz, 0.0);
  op.mirror.resize(nnz);

  // Insert the self-loop into each sorted neighbor row.
  for (node_t i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    std::size_t e = op.offsets[i];
    bool placed = false;
    for (node_t j : nb) {
      if (!placed && j > i) {
        op.cols[e++] = i;
        placed = true;
      }
      op.cols[e++] = j;
    }
    if (!placed) op.cols[e++] = i;
  }

  double cn_max = 0.0;
  double hi_max = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : cn_max, hi_max)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
    const auto i = static_cast<node_t>(ii);
    const double di = static_cast<double>(g.degree(i)) + 1.0;
    for (std::size_t e = op.offsets[i]; e < op.offsets[i + 1]; ++e) {
      const auto j = static_cast<node_t>(op.cols[e]);
      const double dj = static_cast<double>(g.degree(j)) + 1.0;
      op.norm[e] = 1.0 / std::sqrt(di * dj);
      if (i != j) {
        op.cn[e] = static_cast<double>(common_neighbor_count(g, i, j));
        op.hi[e] = static_cast<double>(degree_difference(g, i, j));
        cn_max = std::max(cn_max, op.cn[e]);
        hi_max = std::max(hi_max, op.hi[e]);
      }
      const auto row_j = std::span(op.cols).subspan(op.offsets[j], op.offsets[j + 1] - op.offsets[j]);
      op.mirror[e] = op.offsets[j] + static_cast<std::size_t>(std::lower_bound(row_j.begin(), row_j.end(), i) - row_j.begin());
    }
  }
  op.cn_max = cn_max;
  op.hi_max = hi_max;
  if (cn_max > 0.0) {
    for (double& v : op.cn) v /= cn_max;
  }
  if (hi_max > 0.0) {
    for (double& v : op.hi) v /= hi_max;
  }
  return op;
}

namespace {
double clamped_exponent(double s_cn, double cn, double s_hi, double hi) {
  return std::clamp(s_cn * cn + s_hi * hi, -kExponentClamp, kExponentClamp);
}
}  // namespace

std::vector<double> phi_weights(const PhiOperator& op, const StructureScalars& s) {
  std::vector<double> w(op.nnz());
  for (std::size_t e = 0; e < w.size(); ++e) {
    w[e] = op.norm[e] * std::exp(clamped_exponent(s.s_cn, op.cn[e], s.s_hi, op.hi[e]));
  }
  return w;
}

ModelParams ModelParams::zeros(const ModelShape& shape) {
  if (shape.layers < 1) throw std::invalid_argument("model needs at least one layer");
  ModelParams p;
  p.shape = shape;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    p.enc_w.emplace_back(l == 0 ? shape.input_dim : shape.hidden, shape.hidden);
    p.enc_b.emplace_back(1, shape.hidden);
  }
  p.dec_w1 = Matrix(shape.hidden, shape.hidden);
  p.dec_b1 = Matrix(1, shape.hidden);
  p.dec_w2 = Matrix(shape.hidden, 1);
  p.dec_b2 = Matrix(1, 1);
  return p;
}

ModelParams ModelParams::glorot(const ModelShape& shape, Rng& rng) {
  ModelParams p = zeros(shape);
  auto init = [&rng](Matrix& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (double& v : w.values()) v = rng.uniform(-limit, limit);
  };
  for (auto& w : p.enc_w) init(w);
  init(p.dec_w1);
  init(p.dec_w2);
  p.scalars.s_cn = rng.uniform(0.0, 0.5);
  p.scalars.s_hi = rng.uniform(0.0, 0.5);
  return p;
}

std::vector<Matrix*> ModelParams::blocks() {
  std::vector<Matrix*> out;
  for (std::size_t l = 0; l < enc_w.size(); ++l) {
    out.push_back(&enc_w[l]);
    out.push_back(&enc_b[l]);
  }
  for (Matrix* m : {&dec_w1, &dec_b1, &dec_w2, &dec_b2}) out.push_back(m);
  return out;
}

std::vector<const Matrix*> ModelParams::blocks() const {
  auto mut = const_cast<ModelParams*>(this)->blocks();
  return {mut.begin(), mut.end()};
}

bool ModelParams::all_finite() const {
  for (const Matrix* m : blocks()) {
    for (double v : m->values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return std::isfinite(scalars.s_cn) && std::isfinite(scalars.s_hi);
}

FeatureInput FeatureInput::from_dense(const Matrix& x) {
  FeatureInput in;
  in.x = CsrMatrix::from_dense(x);
  in.xt = in.x.transposed();
  return in;
}

ad::Var edge_weights(ad::Tape& t, const PhiOperator& op, ad::Var s_cn, ad::Var s_hi) {
  StructureScalars s;
  s.s_cn = t.value(s_cn)(0, 0);
  s.s_hi = t.value(s_hi)(0, 0);
  const auto w = phi_weights(op, s);
  Matrix out(w.size(), 1);
  std::copy(w.begin(), w.end(), out.values().begin());
  const bool rg = t.requires_grad(s_cn) || t.requires_grad(s_hi);
  return t.push(std::move(out), rg, [&op, s_cn, s_hi, s](ad::Tape& tp, const Matrix& g) {
    // d w_e / d s = w_e * feature_e inside the clamp, 0 where it engages.
    Matrix d_cn(1, 1);
    Matrix d_hi(1, 1);
    for (std::size_t e = 0; e < op.nnz(); ++e) {
      const double z = s.s_cn * op.cn[e] + s.s_hi * op.hi[e];
      if (z > kExponentClamp || z < -kExponentClamp) continue;
      const double dz = g(e, 0) * op.norm[e] * std::exp(z);
      d_cn(0, 0) += dz * op.cn[e];
      d_hi(0, 0) += dz * op.hi[e];
    }
    tp.accumulate(s_cn, d_cn);
    tp.accumulate(s_hi, d_hi);
  });
}

ad::Var propagate(ad::Tape& t, const PhiOperator& op, ad::Var weights, ad::Var h) {
  Matrix out;
  const auto w = t.value(weights).values();
  kernels::spmm(op.view(w), t.value(h), out);
  const bool rg = t.requires_grad(weights) || t.requires_grad(h);
  return t.push(std::move(out), rg, [&op, weights, h](ad::Tape& tp, const Matrix& g) {
    const auto wv = tp.value(weights).values();
    if (tp.requires_grad(h)) {
      std::vector<double> wt(op.nnz());
      for (std::size_t e = 0; e < wt.size(); ++e) wt[e] = wv[op.mirror[e]];
      Matrix tmp;
      kernels::spmm(op.view(wt), g, tmp);
      tp.accumulate(h, tmp);
    }
    if (tp.requires_grad(weights)) {
      Matrix gw(op.nnz(), 1);
      kernels::sampled_dot(op.view(wv), g, tp.value(h), gw.values());
      tp.accumulate(weights, gw);
    }
  });
}

ModelVars record_encoder(ad::Tape& t, const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                         double dropout, bool training, Rng* rng) {
  if (input.x.rows != op.num_nodes) throw std::invalid_argument("feature rows do not match node count");
  if (input.x.cols != params.shape.input_dim) throw std::invalid_argument("feature width does not match model input");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0, 1)");

  ModelVars vars;
  for (const Matrix* m : params.blocks()) vars.blocks.push_back(t.leaf(*m, true));
  vars.s_cn = t.leaf(Matrix(1, 1, params.scalars.s_cn), params.scalars.train_cn);
  vars.s_hi = t.leaf(Matrix(1, 1, params.scalars.s_hi), params.scalars.train_hi);
  for (std::size_t e = 0; e < op.nnz(); ++e) {
    vars.max_exponent = std::max(vars.max_exponent,
                                 std::abs(params.scalars.s_cn * op.cn[e] + params.scalars.s_hi * op.hi[e]));
  }
  const ad::Var w = edge_weights(t, op, vars.s_cn, vars.s_hi);

  vars.relu_margin = std::numeric_limits<double>::infinity();
  ad::Var h{};
  for (std::size_t l = 0; l < params.shape.layers; ++l) {
    const ad::Var weight = vars.blocks[2 * l];
    const ad::Var bias = vars.blocks[2 * l + 1];
    const ad::Var xw = l == 0 ? ad::sparse_matmul(t, input.x, input.xt, weight) : ad::matmul(t, h, weight);
    const ad::Var pre = ad::add_row_bias(t, propagate(t, op, w, xw), bias);
    if (params.shape.activation == Activation::relu) {
      for (double v : t.value(pre).values()) vars.relu_margin = std::min(vars.relu_margin, std::abs(v));
      h = ad::relu(t, pre);
    } else {
      h = ad::mish(t, pre);
    }
    if (l == 0 && params.shape.layers > 1 && training && dropout > 0.0) {
      if (!rng) throw std::invalid_argument("dropout in training mode needs an rng");
      h = ad::dropout(t, h, dropout, *rng);
    }
  }
  vars.embeddings = h;
  return vars;
}

void record_decoder(ad::Tape& t, ModelVars& vars, const ModelParams& params, std::span<const NodePair> pairs) {
  const std::size_t base = 2 * params.shape.layers;
  const ad::Var sim = ad::pair_hadamard(t, vars.embeddings, pairs);
  const ad::Var hidden = ad::mish(t, ad::add_row_bias(t, ad::matmul(t, sim, vars.blocks[base]), vars.blocks[base + 1]));
  vars.logits = ad::add_row_bias(t, ad::matmul(t, hidden, vars.blocks[base + 2]), vars.blocks[base + 3]);
}

Embeddings gcn_forward(const PhiOperator& op, const FeatureInput& input, const ModelParams& params, double dropout,
                       bool training, Rng* rng) {
  ad::Tape t;
  const auto vars = record_encoder(t, op, input, params, dropout, training, rng);
  return {t.value(vars.embeddings)};
}

std::vector<double> pair_logits(const Embeddings& emb, std::span<const NodePair> pairs, const ModelParams& params) {
  for (const auto& p : pairs) {
    if (p.u >= emb.h.rows() || p.v >= emb.h.rows()) throw std::out_of_range("pair endpoint out of range");
  }
  ad::Tape t;
  ModelVars vars;
  for (const Matrix* m : params.blocks()) vars.blocks.push_back(t.constant(*m));
  vars.embeddings = t.constant(emb.h);
  record_decoder(t, vars, params, pairs);
  const auto z = t.value(vars.logits).values();
  return {z.begin(), z.end()};
}

std::vector<double> pair_probabilities(const Embeddings& emb, std::span<const NodePair> pairs,
                                       const ModelParams& params) {
  auto z = pair_logits(emb, pairs, params);
  for (double& v : z) v = ad::sigmoid(v);
  return z;
}

double bce_loss(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) throw std::invalid_argument("bce_loss: length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], ad::kProbabilityFloor, 1.0 - ad::kProbabilityFloor);
    loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const ModelParams& params, std::uint64_t config_hash, std::uint64_t seed,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("THCK", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, params.shape.input_dim);
  put<std::uint64_t>(out, params.shape.hidden);
  put<std::uint64_t>(out, params.shape.layers);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.activation));
  put<std::uint32_t>(out, (params.scalars.train_cn ? 1u : 0u) | (params.scalars.train_hi ? 2u : 0u));
  put<std::uint64_t>(out, config_hash);
  put<std::uint64_t>(out, seed);
  for (const Matrix* m : params.blocks()) {
    out.write(reinterpret_cast<const char*>(m->data()), static_cast<std::streamsize>(m->size() * sizeof(double)));
  }
  put<double>(out, params.scalars.s_cn);
  put<double>(out, params.scalars.s_hi);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "THCK", 4) != 0) throw std::runtime_error("not a checkpoint: " + path.string());
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported checkpoint version");
  ModelShape shape;
  shape.input_dim = get<std::uint64_t>(in);
  shape.hidden = get<std::uint64_t>(in);
  shape.layers = get<std::uint64_t>(in);
  shape.activation = static_cast<Activation>(get<std::uint32_t>(in));
  const auto flags = get<std::uint32_t>(in);
  Checkpoint ck;
  ck.config_hash = get<std::uint64_t>(in);
  ck.seed = get<std::uint64_t>(in);
  ck.params = ModelParams::zeros(shape);
  for (Matrix* m : ck.params.blocks()) {
    in.read(reinterpret_cast<char*>(m->data()), static_cast<std::streamsize>(m->size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint");
  }
  ck.params.scalars.s_cn = get<double>(in);
  ck.params.scalars.s_hi = get<double>(in);
  ck.params.scalars.train_cn = (flags & 1u) != 0;
  ck.params.scalars.train_hi = (flags & 2u) != 0;
  return ck;
}

}  // namespace trihet
