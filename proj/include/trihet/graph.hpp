#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trihet {

using node_t = std::uint32_t;

/// Unordered node pair. Canonical pairs satisfy u < v.
struct NodePair {
  node_t u = 0;
  node_t v = 0;

  static NodePair canonical(node_t a, node_t b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }
  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable undirected simple graph in CSR form. Neighbor lists are sorted
/// and free of self-loops and duplicates.
class Graph {
 public:
  Graph() = default;

  /// Builds a canonical graph on nodes 0..num_nodes-1. Self-loops are dropped,
  /// duplicate and reversed edges merged.
  static Graph from_edges(std::size_t num_nodes, std::span<const NodePair> edges);

  std::size_t num_nodes() const { return degrees_.size(); }
  std::size_t num_edges() const { return col_indices_.size() / 2; }

  std::span<const node_t> neighbors(node_t i) const {
    return {col_indices_.data() + row_offsets_[i], col_indices_.data() + row_offsets_[i + 1]};
  }
  std::size_t degree(node_t i) const { return degrees_[i]; }
  bool has_edge(node_t i, node_t j) const;

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const node_t> col_indices() const { return col_indices_; }
  std::span<const std::size_t> degrees() const { return degrees_; }

  /// Canonical (u < v) edge list in row-major order.
  std::vector<NodePair> edge_list() const;

  /// Original id of node i (identity when no map was attached).
  std::int64_t original_id(node_t i) const {
    return original_ids_.empty() ? static_cast<std::int64_t>(i) : original_ids_[i];
  }
  std::span<const std::int64_t> original_ids() const { return original_ids_; }
  void set_original_ids(std::vector<std::int64_t> ids);

  /// FNV-1a fingerprint of the CSR structure (not the id map).
  std::uint64_t hash() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.row_offsets_ == b.row_offsets_ && a.col_indices_ == b.col_indices_;
  }

 private:
  std::vector<std::size_t> row_offsets_{0};
  std::vector<node_t> col_indices_;
  std::vector<std::size_t> degrees_;
  std::vector<std::int64_t> original_ids_;
};

struct LoadedGraph {
  Graph graph;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

enum class EdgeFormat { tsv, csv };

/// Parses an edge list (one "u v" or "u,v" per line, '#' comments). Ids are
/// compacted to 0..N-1 in ascending original-id order; the map is attached to
/// the returned graph.
LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeFormat format = EdgeFormat::tsv);
LoadedGraph parse_edge_list(std::string_view text, EdgeFormat format = EdgeFormat::tsv);

/// Writes the canonical edge list with compacted ids, one "u\tv" per line.
void write_edge_list(const Graph& g, const std::filesystem::path& path);
/// Writes "compact_id\toriginal_id" lines.
void write_id_map(const Graph& g, const std::filesystem::path& path);

struct ComponentLabeling {
  /// Component id per node. Ids follow the descending-size order of `sizes`.
  std::vector<std::size_t> label;
  std::vector<std::size_t> sizes;
};

ComponentLabeling connected_components(const Graph& g);

std::size_t common_neighbor_count(const Graph& g, node_t i, node_t j);
std::size_t degree_difference(const Graph& g, node_t i, node_t j);

std::size_t triangle_count(const Graph& g);
/// Transitivity: 3 * triangles / connected triples, 0 without triples.
double global_clustering_coefficient(const Graph& g);
/// Population standard deviation of degrees over the mean degree.
double degree_cv(const Graph& g);

struct Subgraph {
  Graph graph;
  node_t root = 0;
};

/// Induced subgraph on every node within `hops` of a root drawn uniformly with
/// the seeded generator. Node order follows the parent ids; the original-id map
/// is carried through.
Subgraph khop_ego_subgraph(const Graph& g, std::uint64_t seed, std::size_t hops);
Subgraph khop_ego_subgraph_at(const Graph& g, node_t root, std::size_t hops);

/// Unweighted single-source hop distances; unreachable nodes get -1.
std::vector<std::int32_t> bfs_distances(const Graph& g, node_t source);

}  // namespace trihet
