#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "trihet/graph.hpp"
#include "trihet/matrix.hpp"

namespace trihet {

enum class FeatureKind : std::uint32_t { intrinsic = 0, anchor_distance = 1 };

struct FeatureMatrix {
  Matrix values;
  FeatureKind kind = FeatureKind::intrinsic;
  std::vector<node_t> anchor_ids;  // one per column, anchor_distance only
};

/// Which components are "important" enough to contribute anchors.
enum class ComponentRule {
  /// Largest components whose cumulative size first reaches `coverage` * N.
  cumulative_coverage,
  /// Components at least as large as the 80th percentile of component sizes.
  size_percentile,
};

struct AnchorParams {
  double rate = 0.15;
  std::size_t cap = 150;
  double coverage = 0.80;
  std::size_t min_component_size = 2;
  ComponentRule rule = ComponentRule::cumulative_coverage;
};

/// Degree-ranked anchors from the important components, concatenated in
/// component order (largest first). Within a component the top
/// max(1, floor(rate * |C|)) nodes by degree are kept, at most `cap`; degree
/// ties go to the smaller node id.
std::vector<node_t> select_anchors(const Graph& g, const AnchorParams& params = {});

/// One BFS per anchor (columns in parallel). Column j holds hop distance to
/// anchor j divided by the column's largest finite distance; unreachable
/// cells hold 1 + eps.
FeatureMatrix build_anchor_features(const Graph& g, std::span<const node_t> anchors, double eps = 0.01);

// Binary feature file, little-endian:
//   char[4]  magic "THFM"
//   u32      version (1)
//   u64      N
//   u64      k
//   u32      kind (0 intrinsic, 1 anchor_distance)
//   u64[k]   anchor node ids (anchor_distance only)
//   f64[N*k] values, row-major
void save_features(const FeatureMatrix& x, const std::filesystem::path& path);
FeatureMatrix load_features(const std::filesystem::path& path);

/// CSV export for inspection: header "node,f0,...", one row per node.
void export_features_csv(const FeatureMatrix& x, const std::filesystem::path& path);

/// Converter for intrinsic attributes: CSV lines "original_id,v1,...,vk"
/// ('#' comments allowed). Rows are placed by the graph's id map; every node
/// must have exactly one row and all rows the same width.
FeatureMatrix import_features_csv(const std::filesystem::path& path, const Graph& g);

}  // namespace trihet
