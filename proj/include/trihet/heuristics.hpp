#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trihet/graph.hpp"

namespace trihet {

enum class HeuristicMethod { cn, aa, ra, katz, rwr, lp, lrw };

std::string_view to_string(HeuristicMethod m);
HeuristicMethod parse_heuristic(std::string_view name);

/// Baseline hyperparameters. Values are recorded in every report.
struct HeuristicParams {
  double katz_beta = 0.005;
  double rwr_c = 0.85;
  double lp_alpha = 0.001;
  std::size_t lrw_steps = 3;
};

struct PairScores {
  std::vector<NodePair> pairs;
  std::vector<double> scores;
  HeuristicMethod method = HeuristicMethod::cn;
  HeuristicParams params;
};

// All scorers read only `g` (the training graph) and are symmetric in (i, j).
PairScores score_cn(const Graph& g, std::span<const NodePair> pairs);
PairScores score_aa(const Graph& g, std::span<const NodePair> pairs);
PairScores score_ra(const Graph& g, std::span<const NodePair> pairs);
/// Katz index (I - beta A)^-1 - I via conjugate gradients per queried column.
/// Throws when beta * lambda_max(A) >= 1, naming the largest admissible beta.
PairScores score_katz(const Graph& g, std::span<const NodePair> pairs, double beta);
/// Random walk with restart; `c` is the walk-continuation probability.
PairScores score_rwr(const Graph& g, std::span<const NodePair> pairs, double c);
/// Local path index A^2 + alpha A^3.
PairScores score_lp(const Graph& g, std::span<const NodePair> pairs, double alpha);
/// Local random walk after `steps` steps, degree-weighted in both directions.
PairScores score_lrw(const Graph& g, std::span<const NodePair> pairs, std::size_t steps);

PairScores score_pairs(HeuristicMethod m, const Graph& g, std::span<const NodePair> pairs,
                       const HeuristicParams& params = {});

/// Power-method estimate of the largest adjacency eigenvalue (50 iterations
/// on A + I, Rayleigh quotient).
double estimate_spectral_radius(const Graph& g, std::size_t iterations = 50);

}  // namespace trihet
