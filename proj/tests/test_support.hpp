#pragma once

#include <Eigen/Dense>

#include <vector>

#include "trihet/graph.hpp"
#include "trihet/matrix.hpp"
#include "trihet/rng.hpp"

namespace trihet::testing {

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<node_t, node_t>> edges) {
  std::vector<NodePair> e;
  for (auto [u, v] : edges) e.push_back({u, v});
  return Graph::from_edges(n, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<NodePair> e;
  for (node_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_edges(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<NodePair> e;
  for (node_t i = 0; i < n; ++i) e.push_back({i, static_cast<node_t>((i + 1) % n)});
  return Graph::from_edges(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<NodePair> e;
  for (node_t i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph::from_edges(leaves + 1, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<NodePair> e;
  for (node_t i = 0; i < n; ++i)
    for (node_t j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph::from_edges(n, e);
}

/// G(n, p) with the library generator.
inline Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<NodePair> e;
  for (node_t i = 0; i < n; ++i)
    for (node_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) e.push_back({i, j});
  return Graph::from_edges(n, e);
}

/// Planted-partition graph whose node features are noisy block indicators.
struct BlockDataset {
  Graph graph;
  Matrix features;
  std::vector<std::size_t> block;
};

inline BlockDataset block_dataset(std::size_t blocks, std::size_t per_block, double p_in, double p_out,
                                  std::size_t feat_per_block, Rng& rng) {
  BlockDataset d;
  const std::size_t n = blocks * per_block;
  for (std::size_t i = 0; i < n; ++i) d.block.push_back(i / per_block);
  std::vector<NodePair> e;
  for (node_t i = 0; i < n; ++i)
    for (node_t j = i + 1; j < n; ++j)
      if (rng.uniform() < (d.block[i] == d.block[j] ? p_in : p_out)) e.push_back({i, j});
  d.graph = Graph::from_edges(n, e);
  d.features = Matrix(n, blocks * feat_per_block);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d.features.cols(); ++c) {
      const bool own = c / feat_per_block == d.block[i];
      d.features(i, c) = rng.uniform() < (own ? 0.5 : 0.05) ? 1.0 : 0.0;
    }
  return d;
}

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edge_list()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

inline double max_abs_diff(const Matrix& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
  return worst;
}

}  // namespace trihet::testing
