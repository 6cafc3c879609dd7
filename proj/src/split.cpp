#include "trihet/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include <fmt/format.h>

#include "trihet/rng.hpp"

namespace trihet {

namespace {

std::uint64_t pair_key(const NodePair& p, std::size_t n) {
  return static_cast<std::uint64_t>(p.u) * n + p.v;
}

/// Draws `count` distinct canonical non-edges of `g`, skipping anything in
/// `excluded`, and adds each accepted key to `excluded`.
std::vector<NodePair> draw_negatives(const Graph& g, std::size_t count, Rng& rng,
                                     std::unordered_set<std::uint64_t>& excluded) {
  const std::size_t n = g.num_nodes();
  const std::size_t budget = 100 * std::max<std::size_t>(g.num_edges(), 1);
  std::vector<NodePair> out;
  out.reserve(count);
  std::size_t draws = 0;
  while (out.size() < count) {
    if (draws++ >= budget) {
      throw std::runtime_error(fmt::format("negative sampling exceeded retry budget of {} draws ({} of {} found); "
                                           "graph is too dense",
                                           budget, out.size(), count));
    }
    const auto a = static_cast<node_t>(rng.below(n));
    const auto b = static_cast<node_t>(rng.below(n));
    if (a == b) continue;
    const auto p = NodePair::canonical(a, b);
    if (g.has_edge(p.u, p.v)) continue;
    if (!excluded.insert(pair_key(p, n)).second) continue;
    out.push_back(p);
  }
  return out;
}

void check_ratios(const SplitRatios& r) {
  if (!(r.train > 0.0 && r.val > 0.0 && r.test > 0.0)) {
    throw std::invalid_argument("split ratios must all be positive");
  }
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
}

}  // namespace

std::uint64_t LinkSplit::eval_pairs_hash() const {
  Fnv1a h;
  for (const auto* set : {&test_pos, &test_neg}) {
    h.u64(set->size());
    for (const auto& p : *set) {
      h.u64(p.u);
      h.u64(p.v);
    }
  }
  return h.value();
}

std::array<std::size_t, 3> split_counts(std::size_t num_edges, const SplitRatios& ratios) {
  const auto e = static_cast<double>(num_edges);
  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * e));
  const auto n_test = static_cast<std::size_t>(std::llround(ratios.test * e));
  const std::size_t held = n_val + n_test;
  const std::size_t n_train = held <= num_edges ? num_edges - held : 0;
  return {n_train, n_val, n_test};
}

LinkSplit random_link_split(const Graph& g, const SplitRatios& ratios, std::uint64_t seed) {
  check_ratios(ratios);
  const auto [n_train, n_val, n_test] = split_counts(g.num_edges(), ratios);
  if (n_train == 0 || n_val == 0 || n_test == 0) {
    throw std::invalid_argument(fmt::format("graph with {} edges is too small for ratios ({}, {}, {})", g.num_edges(),
                                            ratios.train, ratios.val, ratios.test));
  }

  auto rng = Rng::substream(seed, Stream::split, 0);
  auto edges = g.edge_list();
  shuffle(edges, rng);

  LinkSplit s;
  s.ratios = ratios;
  s.seed = seed;
  s.full_graph = g;
  s.test_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.val_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test),
                   edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  s.train_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), edges.end());

  std::unordered_set<std::uint64_t> taken;
  s.val_neg = draw_negatives(g, n_val, rng, taken);
  s.test_neg = draw_negatives(g, n_test, rng, taken);

  s.train_graph = Graph::from_edges(g.num_nodes(), s.train_pos);
  s.train_graph.set_original_ids(std::vector<std::int64_t>(g.original_ids().begin(), g.original_ids().end()));
  return s;
}

std::vector<NodePair> sample_training_negatives(const LinkSplit& split, std::uint64_t epoch) {
  const std::size_t n = split.full_graph.num_nodes();
  std::unordered_set<std::uint64_t> excluded;
  excluded.reserve(split.val_neg.size() + split.test_neg.size() + split.train_pos.size());
  for (const auto* set : {&split.val_neg, &split.test_neg}) {
    for (const auto& p : *set) excluded.insert(pair_key(p, n));
  }
  auto rng = Rng::substream(split.seed, Stream::train_negatives, epoch);
  return draw_negatives(split.full_graph, split.train_pos.size(), rng, excluded);
}

// Split file layout:
//   # trihet-split v1
//   nodes <N>
//   graph_hash <16 hex digits>
//   ratios <train> <val> <test>
//   seed <u64>
//   prng <id>
//   [train_pos] <count>
//   u v            (count lines)
//   [val_pos] ... [val_neg] ... [test_pos] ... [test_neg] ...
void save_split(const LinkSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# trihet-split v1\n";
  out << "nodes " << split.full_graph.num_nodes() << '\n';
  out << fmt::format("graph_hash {:016x}\n", split.full_graph.hash());
  out << fmt::format("ratios {} {} {}\n", split.ratios.train, split.ratios.val, split.ratios.test);
  out << "seed " << split.seed << '\n';
  out << "prng " << kPrngId << '\n';
  const std::pair<const char*, const std::vector<NodePair>*> sections[] = {
      {"train_pos", &split.train_pos}, {"val_pos", &split.val_pos}, {"val_neg", &split.val_neg},
      {"test_pos", &split.test_pos},   {"test_neg", &split.test_neg}};
  for (const auto& [name, pairs] : sections) {
    out << '[' << name << "] " << pairs->size() << '\n';
    for (const auto& p : *pairs) out << p.u << ' ' << p.v << '\n';
  }
}

LinkSplit load_split(const std::filesystem::path& path, const Graph& full_graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open split file " + path.string());
  LinkSplit s;
  std::string line;
  std::size_t line_no = 0;
  std::vector<NodePair>* current = nullptr;
  std::size_t expected = 0;
  std::size_t nodes = 0;
  std::string hash_hex;
  auto finish_section = [&] {
    if (current && current->size() != expected) throw ParseError("section count mismatch", line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (line[0] == '[') {
      finish_section();
      const auto close = line.find(']');
      if (close == std::string::npos) throw ParseError("bad section header", line_no);
      const std::string name = line.substr(1, close - 1);
      expected = std::stoull(line.substr(close + 1));
      if (name == "train_pos") current = &s.train_pos;
      else if (name == "val_pos") current = &s.val_pos;
      else if (name == "val_neg") current = &s.val_neg;
      else if (name == "test_pos") current = &s.test_pos;
      else if (name == "test_neg") current = &s.test_neg;
      else throw ParseError("unknown section " + name, line_no);
      current->reserve(expected);
      continue;
    }
    if (current) {
      std::uint64_t u = 0;
      std::uint64_t v = 0;
      if (!(ls >> u >> v) || u >= v) throw ParseError("bad pair line", line_no);
      current->push_back({static_cast<node_t>(u), static_cast<node_t>(v)});
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "nodes") ls >> nodes;
    else if (key == "graph_hash") ls >> hash_hex;
    else if (key == "ratios") ls >> s.ratios.train >> s.ratios.val >> s.ratios.test;
    else if (key == "seed") ls >> s.seed;
    else if (key == "prng") {
      std::string id;
      ls >> id;
      if (id != kPrngId) throw ParseError("split written by unsupported PRNG " + id, line_no);
    } else {
      throw ParseError("unknown header key " + key, line_no);
    }
  }
  finish_section();
  if (nodes != full_graph.num_nodes() || hash_hex != fmt::format("{:016x}", full_graph.hash())) {
    throw std::runtime_error("split file " + path.string() + " does not belong to this graph");
  }
  s.full_graph = full_graph;
  s.train_graph = Graph::from_edges(nodes, s.train_pos);
  s.train_graph.set_original_ids(std::vector<std::int64_t>(full_graph.original_ids().begin(), full_graph.original_ids().end()));
  return s;
}

}  // namespace trihet
