#include "trihet/features.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace trihet {

namespace {

std::vector<std::size_t> important_components(const ComponentLabeling& comps, std::size_t n,
                                              const AnchorParams& p) {
  std::vector<std::size_t> chosen;
  if (p.rule == ComponentRule::cumulative_coverage) {
    const double target = p.coverage * static_cast<double>(n);
    std::size_t cumulative = 0;
    for (std::size_t c = 0; c < comps.sizes.size(); ++c) {
      if (comps.sizes[c] < p.min_component_size) break;
      chosen.push_back(c);
      cumulative += comps.sizes[c];
      if (static_cast<double>(cumulative) >= target) break;
    }
  } else {
    // 80th percentile with linear interpolation between order statistics.
    std::vector<double> sorted(comps.sizes.begin(), comps.sizes.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = 0.8 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double pct = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    const double floor_size = std::max(static_cast<double>(p.min_component_size), pct);
    for (std::size_t c = 0; c < comps.sizes.size(); ++c) {
      if (static_cast<double>(comps.sizes[c]) >= floor_size) chosen.push_back(c);
    }
  }
  return chosen;
}

}  // namespace

std::vector<node_t> select_anchors(const Graph& g, const AnchorParams& p) {
  if (g.num_nodes() == 0) throw std::invalid_argument("select_anchors: empty graph");
  if (!(p.rate > 0.0 && p.rate < 1.0)) throw std::invalid_argument("anchor rate must lie in (0, 1)");
  if (p.cap < 1) throw std::invalid_argument("anchor cap must be >= 1");
  if (!(p.coverage > 0.0 && p.coverage <= 1.0)) throw std::invalid_argument("coverage must lie in (0, 1]");

  const auto comps = connected_components(g);
  std::vector<std::vector<node_t>> members(comps.sizes.size());
  for (node_t i = 0; i < g.num_nodes(); ++i) members[comps.label[i]].push_back(i);

  std::vector<node_t> anchors;
  for (std::size_t c : important_components(comps, g.num_nodes(), p)) {
    auto& nodes = members[c];
    std::stable_sort(nodes.begin(), nodes.end(), [&g](node_t a, node_t b) { return g.degree(a) > g.degree(b); });
    auto take = static_cast<std::size_t>(std::floor(p.rate * static_cast<double>(nodes.size())));
    take = std::min(std::max<std::size_t>(take, 1), p.cap);
    anchors.insert(anchors.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return anchors;
}

FeatureMatrix build_anchor_features(const Graph& g, std::span<const node_t> anchors, double eps) {
  if (anchors.empty()) throw std::invalid_argument("build_anchor_features: no anchors");
  for (node_t a : anchors) {
    if (a >= g.num_nodes()) throw std::out_of_range("anchor id out of range");
  }
  const std::size_t n = g.num_nodes();
  const std::size_t k = anchors.size();
  FeatureMatrix x;
  x.kind = FeatureKind::anchor_distance;
  x.anchor_ids.assign(anchors.begin(), anchors.end());
  x.values = Matrix(n, k);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t jj = 0; jj < static_cast<std::int64_t>(k); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const auto dist = bfs_distances(g, anchors[j]);
    const std::int32_t max_finite = *std::max_element(dist.begin(), dist.end());
    for (std::size_t v = 0; v < n; ++v) {
      double value;
      if (dist[v] < 0) {
        value = 1.0 + eps;
      } else if (max_finite > 0) {
        value = static_cast<double>(dist[v]) / static_cast<double>(max_finite);
      } else {
        value = 0.0;
      }
      x.values(v, j) = value;
    }
  }
  return x;
}

namespace {

template <class T>
void put(std::ofstream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "feature files assume a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated feature file");
  return v;
}

}  // namespace

void save_features(const FeatureMatrix& x, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write("THFM", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, x.values.rows());
  put<std::uint64_t>(out, x.values.cols());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(x.kind));
  if (x.kind == FeatureKind::anchor_distance) {
    for (node_t a : x.anchor_ids) put<std::uint64_t>(out, a);
  }
  out.write(reinterpret_cast<const char*>(x.values.data()),
            static_cast<std::streamsize>(x.values.size() * sizeof(double)));
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feature file " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "THFM", 4) != 0) throw std::runtime_error("not a feature file: " + path.string());
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported feature file version");
  const auto n = get<std::uint64_t>(in);
  const auto k = get<std::uint64_t>(in);
  const auto kind = get<std::uint32_t>(in);
  if (kind > 1) throw std::runtime_error("bad feature kind");
  FeatureMatrix x;
  x.kind = static_cast<FeatureKind>(kind);
  if (x.kind == FeatureKind::anchor_distance) {
    x.anchor_ids.resize(k);
    for (auto& a : x.anchor_ids) a = static_cast<node_t>(get<std::uint64_t>(in));
  }
  x.values = Matrix(n, k);
  in.read(reinterpret_cast<char*>(x.values.data()), static_cast<std::streamsize>(n * k * sizeof(double)));
  if (!in) throw std::runtime_error("truncated feature file");
  return x;
}

void export_features_csv(const FeatureMatrix& x, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "node";
  for (std::size_t j = 0; j < x.values.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < x.values.rows(); ++i) {
    out << i;
    for (double v : x.values.row(i)) out << ',' << v;
    out << '\n';
  }
}

FeatureMatrix import_features_csv(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::unordered_map<std::int64_t, node_t> by_original;
  for (node_t i = 0; i < g.num_nodes(); ++i) by_original.emplace(g.original_id(i), i);

  std::vector<std::vector<double>> rows(g.num_nodes());
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::int64_t id = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto [q, ec] = std::from_chars(p, end, id);
    if (ec != std::errc{}) throw ParseError("bad node id", line_no);
    p = q;
    while (p < end) {
      if (*p != ',') throw ParseError("expected ','", line_no);
      ++p;
      double v = 0.0;
      auto [r, ec2] = std::from_chars(p, end, v);
      if (ec2 != std::errc{}) throw ParseError("bad feature value", line_no);
      vals.push_back(v);
      p = r;
      while (p < end && (*p == ' ' || *p == '\r')) ++p;
    }
    const auto it = by_original.find(id);
    if (it == by_original.end()) continue;  // node absent from the edge list
    if (width == 0) width = vals.size();
    if (vals.size() != width || width == 0) throw ParseError("inconsistent feature width", line_no);
    if (!rows[it->second].empty()) throw ParseError("duplicate row for node " + std::to_string(id), line_no);
    rows[it->second] = std::move(vals);
  }
  FeatureMatrix x;
  x.kind = FeatureKind::intrinsic;
  x.values = Matrix(g.num_nodes(), width);
  for (node_t i = 0; i < g.num_nodes(); ++i) {
    if (rows[i].empty()) throw std::runtime_error("no feature row for node " + std::to_string(g.original_id(i)));
    std::copy(rows[i].begin(), rows[i].end(), x.values.row(i).begin());
  }
  return x;
}

}  // namespace trihet
