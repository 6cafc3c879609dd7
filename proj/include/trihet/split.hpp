#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "trihet/graph.hpp"

namespace trihet {

struct SplitRatios {
  double train = 0.85;
  double val = 0.05;
  double test = 0.10;
};

/// Train/validation/test positives with matched validation and test negatives.
/// All pairs are canonical (u < v). `train_graph` is built from `train_pos`
/// only and is the graph every model and heuristic reads.
struct LinkSplit {
  std::vector<NodePair> train_pos;
  std::vector<NodePair> val_pos;
  std::vector<NodePair> val_neg;
  std::vector<NodePair> test_pos;
  std::vector<NodePair> test_neg;
  Graph train_graph;
  Graph full_graph;
  SplitRatios ratios;
  std::uint64_t seed = 0;

  /// Fingerprint of the test positive and negative pair sets.
  std::uint64_t eval_pairs_hash() const;
};

/// Positive counts for `num_edges` under `ratios`: validation and test counts
/// are rounded to nearest, training takes the remainder.
std::array<std::size_t, 3> split_counts(std::size_t num_edges, const SplitRatios& ratios);

LinkSplit random_link_split(const Graph& g, const SplitRatios& ratios, std::uint64_t seed);

/// |train_pos| non-edges of the full graph, distinct, disjoint from the
/// validation and test negatives, drawn from the per-epoch substream.
std::vector<NodePair> sample_training_negatives(const LinkSplit& split, std::uint64_t epoch);

void save_split(const LinkSplit& split, const std::filesystem::path& path);
/// Reloads a split; the full graph is required to restore the non-edge
/// contract and is checked against the stored hash.
LinkSplit load_split(const std::filesystem::path& path, const Graph& full_graph);

}  // namespace trihet
