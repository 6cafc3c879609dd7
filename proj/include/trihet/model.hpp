#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trihet/autodiff.hpp"
#include "trihet/graph.hpp"
#include "trihet/matrix.hpp"
#include "trihet/rng.hpp"

namespace trihet {

/// Static part of the structure-aware propagation operator. The pattern is
/// the training adjacency plus self-loops (rows sorted). Per entry it holds
/// the symmetric GCN normalization of A + I and the common-neighbor count and
/// degree difference on A, each divided by its maximum over the edge set.
/// Self-loop entries carry cn = hi = 0.
struct PhiOperator {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> norm;
  std::vector<double> cn;
  std::vector<double> hi;
  std::vector<std::size_t> mirror;  // index of entry (j, i) for entry (i, j)
  double cn_max = 0.0;              // raw maxima used for normalization
  double hi_max = 0.0;

  std::size_t nnz() const { return cols.size(); }
  CsrView view(std::span<const double> weights) const {
    return {num_nodes, num_nodes, offsets, cols, weights};
  }
};

PhiOperator build_phi_static(const Graph& train_graph);

inline constexpr double kExponentClamp = 10.0;

struct StructureScalars {
  double s_cn = 0.0;
  double s_hi = 0.0;
  bool train_cn = true;
  bool train_hi = true;
};

/// norm_ij * exp(clamp(s_cn * cn_ij + s_hi * hi_ij, -10, 10)) per entry.
std::vector<double> phi_weights(const PhiOperator& op, const StructureScalars& s);

enum class Activation { relu, mish };

struct ModelShape {
  std::size_t input_dim = 0;
  std::size_t hidden = 128;
  std::size_t layers = 2;
  Activation activation = Activation::relu;
};

/// Encoder layer weights/biases, decoder weights/biases and structure scalars.
/// Biases are 1 x n row vectors; the decoder output weight is hidden x 1.
struct ModelParams {
  ModelShape shape;
  std::vector<Matrix> enc_w;
  std::vector<Matrix> enc_b;
  Matrix dec_w1;
  Matrix dec_b1;
  Matrix dec_w2;
  Matrix dec_b2;
  StructureScalars scalars;
  /// Bumped by every optimizer step; recorded passes compare against it.
  std::uint64_t version = 0;

  static ModelParams zeros(const ModelShape& shape);
  /// Glorot-uniform weights, zero biases, then s_cn and s_hi ~ U[0, 0.5], in
  /// that draw order.
  static ModelParams glorot(const ModelShape& shape, Rng& rng);

  /// Dense blocks in checkpoint order: enc_w[0], enc_b[0], ..., dec_w1,
  /// dec_b1, dec_w2, dec_b2.
  std::vector<Matrix*> blocks();
  std::vector<const Matrix*> blocks() const;
  bool all_finite() const;
};

/// Node features prepared for the first layer (sparse, plus its transpose).
struct FeatureInput {
  CsrMatrix x;
  CsrMatrix xt;

  static FeatureInput from_dense(const Matrix& x);
};

struct Embeddings {
  Matrix h;
};

/// Tape handles for one recorded forward pass.
struct ModelVars {
  std::vector<ad::Var> blocks;  // same order as ModelParams::blocks()
  ad::Var s_cn;
  ad::Var s_hi;
  ad::Var embeddings;
  ad::Var logits;
  /// Smallest |x| over rectifier inputs; finite-difference checks need it
  /// away from the kink.
  double relu_margin = 0.0;
  /// Largest |s_cn * cn + s_hi * hi| over entries.
  double max_exponent = 0.0;
};

/// Records the encoder on `tape`. Dropout (after the first layer's activation)
/// is applied only when `training` is set and needs `rng`.
ModelVars record_encoder(ad::Tape& tape, const PhiOperator& op, const FeatureInput& input,
                         const ModelParams& params, double dropout, bool training, Rng* rng);
/// Records the Hadamard decoder on top of `vars.embeddings`, filling `vars.logits`.
void record_decoder(ad::Tape& tape, ModelVars& vars, const ModelParams& params, std::span<const NodePair> pairs);

// Tape primitives specific to the propagation operator.
ad::Var edge_weights(ad::Tape& t, const PhiOperator& op, ad::Var s_cn, ad::Var s_hi);
ad::Var propagate(ad::Tape& t, const PhiOperator& op, ad::Var weights, ad::Var h);

Embeddings gcn_forward(const PhiOperator& op, const FeatureInput& input, const ModelParams& params,
                       double dropout = 0.0, bool training = false, Rng* rng = nullptr);
std::vector<double> pair_logits(const Embeddings& emb, std::span<const NodePair> pairs, const ModelParams& params);
/// sigmoid of pair_logits, in (0, 1).
std::vector<double> pair_probabilities(const Embeddings& emb, std::span<const NodePair> pairs,
                                       const ModelParams& params);
/// Summed (not averaged) binary cross-entropy with probabilities clamped to
/// [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probs, std::span<const int> labels);

// Checkpoint file, little-endian:
//   char[4] "THCK", u32 version (1)
//   u64 input_dim, u64 hidden, u64 layers, u32 activation, u32 flags
//       (bit 0 train_cn, bit 1 train_hi)
//   u64 config_hash, u64 seed
//   f64 blocks in ModelParams::blocks() order, each row-major
//   f64 s_cn, f64 s_hi
void save_checkpoint(const ModelParams& params, std::uint64_t config_hash, std::uint64_t seed,
                     const std::filesystem::path& path);
struct Checkpoint {
  ModelParams params;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace trihet
