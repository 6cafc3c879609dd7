#include "trihet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "trihet/rng.hpp"

namespace trihet {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const NodePair> edges) {
  std::vector<NodePair> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) throw std::out_of_range("edge endpoint out of range");
    if (e.u == e.v) continue;
    canon.push_back(NodePair::canonical(e.u, e.v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.degrees_.assign(num_nodes, 0);
  for (const auto& e : canon) {
    ++g.degrees_[e.u];
    ++g.degrees_[e.v];
  }
  g.row_offsets_.assign(num_nodes + 1, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) g.row_offsets_[i + 1] = g.row_offsets_[i] + g.degrees_[i];
  g.col_indices_.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (const auto& e : canon) {
    g.col_indices_[cursor[e.u]++] = e.v;
    g.col_indices_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::sort(g.col_indices_.begin() + static_cast<std::ptrdiff_t>(g.row_offsets_[i]),
              g.col_indices_.begin() + static_cast<std::ptrdiff_t>(g.row_offsets_[i + 1]));
  }
  return g;
}

bool Graph::has_edge(node_t i, node_t j) const {
  if (degree(i) > degree(j)) std::swap(i, j);
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<NodePair> Graph::edge_list() const {
  std::vector<NodePair> out;
  out.reserve(num_edges());
  for (node_t i = 0; i < num_nodes(); ++i) {
    for (node_t j : neighbors(i)) {
      if (i < j) out.push_back({i, j});
    }
  }
  return out;
}

void Graph::set_original_ids(std::vector<std::int64_t> ids) {
  if (!ids.empty() && ids.size() != num_nodes()) throw std::invalid_argument("id map size mismatch");
  original_ids_ = std::move(ids);
}

std::uint64_t Graph::hash() const {
  Fnv1a h;
  h.u64(num_nodes());
  for (auto c : col_indices_) h.u64(c);
  for (auto r : row_offsets_) h.u64(r);
  return h.value();
}

namespace {

bool parse_id(std::string_view tok, std::int64_t& out) {
  if (tok.empty()) return false;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && out >= 0;
}

// Both formats accept whitespace and commas; `format` only documents intent.
std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

LoadedGraph parse_edge_list(std::string_view text, EdgeFormat /*format*/) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto toks = split_tokens(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    std::int64_t u = 0;
    std::int64_t v = 0;
    if (toks.size() != 2 || !parse_id(toks[0], u) || !parse_id(toks[1], v)) {
      throw ParseError("malformed edge line '" + std::string(line) + "'", line_no);
    }
    raw.emplace_back(u, v);
  }
  if (raw.empty()) throw std::runtime_error("edge list is empty");

  std::vector<std::int64_t> ids;
  ids.reserve(2 * raw.size());
  for (auto [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto compact = [&ids](std::int64_t id) {
    return static_cast<node_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  LoadedGraph out;
  std::vector<NodePair> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw) {
    if (u == v) {
      ++out.self_loops;
      continue;
    }
    edges.push_back(NodePair::canonical(compact(u), compact(v)));
  }
  std::vector<NodePair> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  out.duplicates = static_cast<std::size_t>(sorted.end() - std::unique(sorted.begin(), sorted.end()));

  out.graph = Graph::from_edges(ids.size(), edges);
  out.graph.set_original_ids(std::move(ids));
  return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str(), format);
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : g.edge_list()) out << e.u << '\t' << e.v << '\n';
}

void write_id_map(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (node_t i = 0; i < g.num_nodes(); ++i) out << i << '\t' << g.original_id(i) << '\n';
}

ComponentLabeling connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> raw(n, unset);
  std::vector<std::size_t> raw_sizes;
  std::vector<node_t> queue;
  queue.reserve(n);
  for (node_t s = 0; s < n; ++s) {
    if (raw[s] != unset) continue;
    const std::size_t id = raw_sizes.size();
    queue.clear();
    queue.push_back(s);
    raw[s] = id;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (node_t v : g.neighbors(queue[head])) {
        if (raw[v] == unset) {
          raw[v] = id;
          queue.push_back(v);
        }
      }
    }
    raw_sizes.push_back(queue.size());
  }

  // Relabel by descending size; ties keep discovery order (smallest min node id).
  std::vector<std::size_t> order(raw_sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw_sizes[a] > raw_sizes[b]; });
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  ComponentLabeling out;
  out.label.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.label[i] = rank[raw[i]];
  out.sizes.resize(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) out.sizes[r] = raw_sizes[order[r]];
  return out;
}

namespace {
void check_node(const Graph& g, node_t i) {
  if (i >= g.num_nodes()) throw std::out_of_range("node " + std::to_string(i) + " out of range");
}
}  // namespace

std::size_t common_neighbor_count(const Graph& g, node_t i, node_t j) {
  check_node(g, i);
  check_node(g, j);
  const auto a = g.neighbors(i);
  const auto b = g.neighbors(j);
  std::size_t count = 0;
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() && y != b.end()) {
    if (*x < *y) {
      ++x;
    } else if (*y < *x) {
      ++y;
    } else {
      ++count;
      ++x;
      ++y;
    }
  }
  return count;
}

std::size_t degree_difference(const Graph& g, node_t i, node_t j) {
  check_node(g, i);
  check_node(g, j);
  const auto di = g.degree(i);
  const auto dj = g.degree(j);
  return di > dj ? di - dj : dj - di;
}

std::size_t triangle_count(const Graph& g) {
  std::size_t total = 0;
  for (node_t u = 0; u < g.num_nodes(); ++u) {
    const auto nu = g.neighbors(u);
    for (node_t v : nu) {
      if (v <= u) continue;
      // Count w > v adjacent to both, so each triangle u<v<w is seen once.
      const auto nv = g.neighbors(v);
      auto x = std::upper_bound(nu.begin(), nu.end(), v);
      auto y = std::upper_bound(nv.begin(), nv.end(), v);
      while (x != nu.end() && y != nv.end()) {
        if (*x < *y) {
          ++x;
        } else if (*y < *x) {
          ++y;
        } else {
          ++total;
          ++x;
          ++y;
        }
      }
    }
  }
  return total;
}

double global_clustering_coefficient(const Graph& g) {
  double triples = 0.0;
  for (auto d : g.degrees()) triples += 0.5 * static_cast<double>(d) * static_cast<double>(d > 0 ? d - 1 : 0);
  if (triples == 0.0) return 0.0;
  return 3.0 * static_cast<double>(triangle_count(g)) / triples;
}

double degree_cv(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("degree_cv: empty graph");
  double mean = 0.0;
  for (auto d : g.degrees()) mean += static_cast<double>(d);
  mean /= static_cast<double>(n);
  if (mean <= 0.0) throw std::invalid_argument("degree_cv: graph has no edges");
  double var = 0.0;
  for (auto d : g.degrees()) var += (static_cast<double>(d) - mean) * (static_cast<double>(d) - mean);
  var /= static_cast<double>(n);
  return std::sqrt(var) / mean;
}

std::vector<std::int32_t> bfs_distances(const Graph& g, node_t source) {
  std::vector<std::int32_t> dist(g.num_nodes(), -1);
  std::vector<node_t> queue;
  queue.reserve(g.num_nodes());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const node_t u = queue[head];
    for (node_t v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Subgraph khop_ego_subgraph_at(const Graph& g, node_t root, std::size_t hops) {
  check_node(g, root);
  if (hops < 1) throw std::invalid_argument("hops must be >= 1");
  std::vector<std::int64_t> depth(g.num_nodes(), -1);
  std::vector<node_t> queue{root};
  depth[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const node_t u = queue[head];
    if (static_cast<std::size_t>(depth[u]) == hops) continue;
    for (node_t v : g.neighbors(u)) {
      if (depth[v] < 0) {
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::vector<node_t> members = queue;
  std::sort(members.begin(), members.end());
  std::vector<std::int64_t> local(g.num_nodes(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<std::int64_t>(k);

  std::vector<NodePair> edges;
  for (node_t u : members) {
    for (node_t v : g.neighbors(u)) {
      if (u < v && local[v] >= 0) {
        edges.push_back({static_cast<node_t>(local[u]), static_cast<node_t>(local[v])});
      }
    }
  }
  Subgraph out;
  out.graph = Graph::from_edges(members.size(), edges);
  std::vector<std::int64_t> ids(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) ids[k] = g.original_id(members[k]);
  out.graph.set_original_ids(std::move(ids));
  out.root = static_cast<node_t>(local[root]);
  return out;
}

Subgraph khop_ego_subgraph(const Graph& g, std::uint64_t seed, std::size_t hops) {
  if (g.num_nodes() == 0) throw std::invalid_argument("khop_ego_subgraph: empty graph");
  auto rng = Rng::substream(seed, Stream::ego_root, 0);
  const auto root = static_cast<node_t>(rng.below(g.num_nodes()));
  return khop_ego_subgraph_at(g, root, hops);
}

}  // namespace trihet
