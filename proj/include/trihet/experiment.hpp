#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trihet/features.hpp"
#include "trihet/graph.hpp"
#include "trihet/heuristics.hpp"
#include "trihet/metrics.hpp"
#include "trihet/split.hpp"
#include "trihet/trainer.hpp"

namespace trihet {

/// Thrown for invalid user configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetEntry {
  std::string name;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t feature_dims = 0;
  bool intrinsic_features = true;  // false: anchor pseudo-features
  double lr = 0.01;
  std::size_t hidden = 128;
  bool large = false;  // full-graph training needs allow_large
  std::size_t heuristic_hops = 0;  // >0: heuristics run on an ego subgraph
};

std::span<const DatasetEntry> dataset_registry();
/// Case-insensitive lookup; nullptr for unknown names.
const DatasetEntry* find_dataset(std::string_view name);

enum class FeatureSource { intrinsic, anchor };

struct PrepareOptions {
  std::string dataset;
  std::filesystem::path edges;
  std::filesystem::path features;  // empty: anchor features
  std::filesystem::path out_dir;
  AnchorParams anchors;
  SplitRatios ratios;
  std::uint64_t seed = 42;
  bool check_counts = true;
};

struct PreparedSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t feature_dims = 0;
  FeatureKind feature_kind = FeatureKind::intrinsic;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings;
};

/// Loads, validates against the registry, builds features and the base split,
/// and writes graph.tsv, ids.tsv, features.bin, split.txt and dataset.txt into
/// out_dir. Deterministic for identical inputs.
PreparedSummary cmd_prepare(const PrepareOptions& opt);

struct PreparedData {
  std::string dataset;
  Graph graph;
  FeatureMatrix features;
  SplitRatios ratios;
  std::uint64_t seed = 42;
};
PreparedData load_prepared(const std::filesystem::path& dir);

/// Methods: trihet, gcn, gcn_cn, gcn_hi (trained) or any heuristic name.
struct RunConfig {
  std::filesystem::path prepared;
  std::string method = "trihet";
  std::size_t repeats = 10;
  std::uint64_t seed = 42;
  SplitRatios ratios;
  TrainConfig train;
  HeuristicParams heuristic;
  bool allow_large = false;
  std::optional<std::size_t> heuristic_hops;  // default from the registry
  std::size_t workers = 0;                   // 0: OpenMP default
  std::filesystem::path out_dir;             // per-repeat history/checkpoints

  bool is_model() const;
  /// Throws ConfigError.
  void validate() const;
  /// Flat "key = value" text, keys sorted. Hash and file form.
  std::string to_text() const;
  std::uint64_t hash() const;
  static RunConfig from_text(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
};

/// Applies the registry's learning rate and hidden width for `dataset`.
void apply_dataset_defaults(RunConfig& cfg, std::string_view dataset);

/// Runs `cfg.repeats` independent repeats. Repeat r uses the split drawn with
/// repeat_seed(cfg.seed, r) and, for models, the same value as model seed.
/// Failed repeats are counted and left out of the aggregate.
EvalReport cmd_run(const RunConfig& cfg);
EvalReport cmd_run(const RunConfig& cfg, const PreparedData& data);

/// Same splits for every method; one report per method.
std::vector<EvalReport> cmd_baseline(const RunConfig& base, std::span<const HeuristicMethod> methods,
                                     const PreparedData& data);
/// Runs gcn, gcn_cn, gcn_hi, trihet on identical splits.
std::vector<EvalReport> cmd_ablate(const RunConfig& base, const PreparedData& data);

void save_report_json(const EvalReport& r, const std::filesystem::path& path);
EvalReport load_report_json(const std::filesystem::path& path);

/// CSV `dataset,method,repeats,auc_mean,auc_std,ap_mean,ap_std,config_hash`.
std::string report_csv(std::span<const EvalReport> reports);
/// Dataset x method matrices for AUC and AP ("mean ± std").
std::string report_markdown(std::span<const EvalReport> reports);

struct StructureStats {
  std::string dataset;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double clustering = 0.0;
  double degree_cv = 0.0;
};
StructureStats structure_stats(std::string dataset, const Graph& g);
/// CSV `dataset,nodes,edges,clustering,degree_cv`.
std::string stats_csv(std::span<const StructureStats> rows);

}  // namespace trihet
