#include "trihet/heuristics.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace trihet {

std::string_view to_string(HeuristicMethod m) {
  switch (m) {
    case HeuristicMethod::cn: return "cn";
    case HeuristicMethod::aa: return "aa";
    case HeuristicMethod::ra: return "ra";
    case HeuristicMethod::katz: return "katz";
    case HeuristicMethod::rwr: return "rwr";
    case HeuristicMethod::lp: return "lp";
    case HeuristicMethod::lrw: return "lrw";
  }
  return "?";
}

HeuristicMethod parse_heuristic(std::string_view name) {
  for (auto m : {HeuristicMethod::cn, HeuristicMethod::aa, HeuristicMethod::ra, HeuristicMethod::katz,
                 HeuristicMethod::rwr, HeuristicMethod::lp, HeuristicMethod::lrw}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown heuristic '" + std::string(name) + "'");
}

namespace {

using index_t = std::int64_t;

PairScores make_result(HeuristicMethod m, std::span<const NodePair> pairs) {
  PairScores out;
  out.method = m;
  out.pairs.assign(pairs.begin(), pairs.end());
  out.scores.assign(pairs.size(), 0.0);
  return out;
}

void check_pairs(const Graph& g, std::span<const NodePair> pairs) {
  for (const auto& p : pairs) {
    if (p.u >= g.num_nodes() || p.v >= g.num_nodes()) throw std::out_of_range("pair endpoint out of range");
  }
}

/// Calls f(z) for every common neighbor z of i and j.
template <class F>
void for_each_common(const Graph& g, node_t i, node_t j, F&& f) {
  const auto a = g.neighbors(i);
  const auto b = g.neighbors(j);
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() && y != b.end()) {
    if (*x < *y) {
      ++x;
    } else if (*y < *x) {
      ++y;
    } else {
      f(*x);
      ++x;
      ++y;
    }
  }
}

template <class Weight>
PairScores neighbor_sum(HeuristicMethod m, const Graph& g, std::span<const NodePair> pairs, Weight weight) {
  check_pairs(g, pairs);
  auto out = make_result(m, pairs);
#pragma omp parallel for schedule(dynamic, 256)
  for (index_t k = 0; k < static_cast<index_t>(pairs.size()); ++k) {
    double s = 0.0;
    for_each_common(g, pairs[k].u, pairs[k].v, [&](node_t z) { s += weight(z); });
    out.scores[k] = s;
  }
  return out;
}

/// Groups pair indices by endpoint so per-source work runs once per node.
/// first[p] is true when the group node is pairs[p].u.
struct SourceGroups {
  std::vector<node_t> sources;
  std::vector<std::vector<std::pair<std::size_t, bool>>> members;
};

SourceGroups group_by_endpoint(std::span<const NodePair> pairs) {
  std::map<node_t, std::size_t> slot;
  SourceGroups out;
  auto add = [&](node_t s, std::size_t p, bool first) {
    auto [it, inserted] = slot.emplace(s, out.sources.size());
    if (inserted) {
      out.sources.push_back(s);
      out.members.emplace_back();
    }
    out.members[it->second].emplace_back(p, first);
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    add(pairs[p].u, p, true);
    add(pairs[p].v, p, false);
  }
  return out;
}

/// y = P^T x for the row-normalized adjacency (isolated rows are zero).
void transition_transpose(const Graph& g, std::span<const double> x, std::span<double> y) {
  for (node_t v = 0; v < g.num_nodes(); ++v) {
    double s = 0.0;
    for (node_t u : g.neighbors(v)) s += x[u] / static_cast<double>(g.degree(u));
    y[v] = s;
  }
}

}  // namespace

PairScores score_cn(const Graph& g, std::span<const NodePair> pairs) {
  return neighbor_sum(HeuristicMethod::cn, g, pairs, [](node_t) { return 1.0; });
}

PairScores score_aa(const Graph& g, std::span<const NodePair> pairs) {
  return neighbor_sum(HeuristicMethod::aa, g, pairs, [&g](node_t z) {
    // A common neighbor of two distinct nodes has degree >= 2 in a simple graph.
    assert(g.degree(z) >= 2);
    return 1.0 / std::log(static_cast<double>(g.degree(z)));
  });
}

PairScores score_ra(const Graph& g, std::span<const NodePair> pairs) {
  return neighbor_sum(HeuristicMethod::ra, g, pairs,
                      [&g](node_t z) { return 1.0 / static_cast<double>(g.degree(z)); });
}

double estimate_spectral_radius(const Graph& g, std::size_t iterations) {
  const std::size_t n = g.num_nodes();
  if (n == 0 || g.num_edges() == 0) return 0.0;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  auto apply_a = [&g](const std::vector<double>& in, std::vector<double>& out) {
    for (node_t i = 0; i < g.num_nodes(); ++i) {
      double s = 0.0;
      for (node_t j : g.neighbors(i)) s += in[j];
      out[i] = s;
    }
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    apply_a(x, y);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += x[i];  // shift by I so the dominant eigenvalue is lambda_max + 1
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  apply_a(x, y);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += x[i] * y[i];
    den += x[i] * x[i];
  }
  return num / den;
}

PairScores score_katz(const Graph& g, std::span<const NodePair> pairs, double beta) {
  check_pairs(g, pairs);
  if (beta < 0.0) throw std::invalid_argument("katz beta must be non-negative");
  auto out = make_result(HeuristicMethod::katz, pairs);
  out.params.katz_beta = beta;
  if (beta == 0.0) return out;
  const double lambda = estimate_spectral_radius(g);
  if (beta * lambda >= 1.0) {
    throw std::invalid_argument(fmt::format(
        "katz beta {} violates beta * lambda_max < 1 (lambda_max ~ {:.6g}); max admissible beta is {:.6g}", beta,
        lambda, 1.0 / lambda));
  }

  const std::size_t n = g.num_nodes();
  // Column j of (I - beta A)^-1 solves the SPD system (I - beta A) x = e_j.
  std::map<node_t, std::vector<std::size_t>> by_column;
  for (std::size_t p = 0; p < pairs.size(); ++p) by_column[pairs[p].v].push_back(p);
  std::vector<std::pair<node_t, std::vector<std::size_t>>> columns(by_column.begin(), by_column.end());
  const std::size_t max_iter = 10 * n + 1000;
  bool failed = false;

#pragma omp parallel
  {
    std::vector<double> x(n), r(n), p(n), ap(n);
#pragma omp for schedule(dynamic, 4)
    for (index_t c = 0; c < static_cast<index_t>(columns.size()); ++c) {
      const node_t j = columns[c].first;
      std::fill(x.begin(), x.end(), 0.0);
      std::fill(r.begin(), r.end(), 0.0);
      r[j] = 1.0;
      p = r;
      double rr = 1.0;
      std::size_t it = 0;
      while (std::sqrt(rr) > 1e-13 && it < max_iter) {
        for (node_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (node_t k : g.neighbors(i)) s += p[k];
          ap[i] = p[i] - beta * s;
        }
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        const double alpha = rr / pap;
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * ap[i];
          rr_new += r[i] * r[i];
        }
        const double ratio = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + ratio * p[i];
        rr = rr_new;
        ++it;
      }
      if (std::sqrt(rr) > 1e-13) {
#pragma omp atomic write
        failed = true;
      }
      for (std::size_t idx : columns[c].second) {
        const node_t i = pairs[idx].u;
        out.scores[idx] = x[i] - (i == j ? 1.0 : 0.0);
      }
    }
  }
  if (failed) throw std::runtime_error("katz: conjugate gradients did not reach tolerance");
  return out;
}

PairScores score_rwr(const Graph& g, std::span<const NodePair> pairs, double c) {
  check_pairs(g, pairs);
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("rwr c must lie in (0, 1)");
  auto out = make_result(HeuristicMethod::rwr, pairs);
  out.params.rwr_c = c;
  const auto groups = group_by_endpoint(pairs);
  const std::size_t n = g.num_nodes();
  std::vector<double> from_u(pairs.size()), from_v(pairs.size());
  bool failed = false;

#pragma omp parallel
  {
    std::vector<double> pi(n), next(n);
#pragma omp for schedule(dynamic, 4)
    for (index_t s = 0; s < static_cast<index_t>(groups.sources.size()); ++s) {
      const node_t src = groups.sources[s];
      std::fill(pi.begin(), pi.end(), 0.0);
      pi[src] = 1.0;
      bool converged = false;
      for (int it = 0; it < 10000 && !converged; ++it) {
        transition_transpose(g, pi, next);
        double diff = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
          const double val = c * next[v] + (v == src ? 1.0 - c : 0.0);
          diff += std::abs(val - pi[v]);
          pi[v] = val;
        }
        converged = diff < 1e-10;
      }
      if (!converged) {
#pragma omp atomic write
        failed = true;
      }
      for (auto [p, first] : groups.members[s]) {
        if (first) from_u[p] = pi[pairs[p].v];
        else from_v[p] = pi[pairs[p].u];
      }
    }
  }
  if (failed) throw std::runtime_error("rwr: no convergence within 10000 iterations");
  for (std::size_t p = 0; p < pairs.size(); ++p) out.scores[p] = from_u[p] + from_v[p];
  return out;
}

PairScores score_lp(const Graph& g, std::span<const NodePair> pairs, double alpha) {
  check_pairs(g, pairs);
  if (alpha < 0.0) throw std::invalid_argument("lp alpha must be non-negative");
  auto out = make_result(HeuristicMethod::lp, pairs);
  out.params.lp_alpha = alpha;
#pragma omp parallel
  {
    std::vector<char> mark(g.num_nodes(), 0);
#pragma omp for schedule(dynamic, 256)
    for (index_t k = 0; k < static_cast<index_t>(pairs.size()); ++k) {
      const node_t i = pairs[k].u;
      const node_t j = pairs[k].v;
      for (node_t z : g.neighbors(j)) mark[z] = 1;
      double two = 0.0;
      double three = 0.0;
      for (node_t z : g.neighbors(i)) {
        two += mark[z];
        for (node_t w : g.neighbors(z)) three += mark[w];
      }
      for (node_t z : g.neighbors(j)) mark[z] = 0;
      out.scores[k] = two + alpha * three;
    }
  }
  return out;
}

PairScores score_lrw(const Graph& g, std::span<const NodePair> pairs, std::size_t steps) {
  check_pairs(g, pairs);
  if (steps < 1) throw std::invalid_argument("lrw needs at least one step");
  auto out = make_result(HeuristicMethod::lrw, pairs);
  out.params.lrw_steps = steps;
  if (g.num_edges() == 0) return out;
  const auto groups = group_by_endpoint(pairs);
  const std::size_t n = g.num_nodes();
  const double two_m = 2.0 * static_cast<double>(g.num_edges());
  std::vector<double> from_u(pairs.size()), from_v(pairs.size());

#pragma omp parallel
  {
    std::vector<double> pi(n), next(n);
#pragma omp for schedule(dynamic, 4)
    for (index_t s = 0; s < static_cast<index_t>(groups.sources.size()); ++s) {
      const node_t src = groups.sources[s];
      std::fill(pi.begin(), pi.end(), 0.0);
      pi[src] = 1.0;
      for (std::size_t t = 0; t < steps; ++t) {
        transition_transpose(g, pi, next);
        std::swap(pi, next);
      }
      const double weight = static_cast<double>(g.degree(src)) / two_m;
      for (auto [p, first] : groups.members[s]) {
        if (first) from_u[p] = weight * pi[pairs[p].v];
        else from_v[p] = weight * pi[pairs[p].u];
      }
    }
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) out.scores[p] = from_u[p] + from_v[p];
  return out;
}

PairScores score_pairs(HeuristicMethod m, const Graph& g, std::span<const NodePair> pairs,
                       const HeuristicParams& params) {
  PairScores out;
  switch (m) {
    case HeuristicMethod::cn: out = score_cn(g, pairs); break;
    case HeuristicMethod::aa: out = score_aa(g, pairs); break;
    case HeuristicMethod::ra: out = score_ra(g, pairs); break;
    case HeuristicMethod::katz: out = score_katz(g, pairs, params.katz_beta); break;
    case HeuristicMethod::rwr: out = score_rwr(g, pairs, params.rwr_c); break;
    case HeuristicMethod::lp: out = score_lp(g, pairs, params.lp_alpha); break;
    case HeuristicMethod::lrw: out = score_lrw(g, pairs, params.lrw_steps); break;
  }
  out.params = params;
  return out;
}

}  // namespace trihet
