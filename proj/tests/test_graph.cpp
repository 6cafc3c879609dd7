#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "test_support.hpp"
#include "trihet/graph.hpp"
#include "trihet/rng.hpp"

using namespace trihet;
using namespace trihet::testing;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng r(7);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, SubstreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (auto s : {Stream::split, Stream::train_negatives, Stream::model_init, Stream::dropout, Stream::ego_root})
    for (std::uint64_t i = 0; i < 20; ++i) seen.insert(derive_seed(42, s, i));
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Rng, RepeatZeroIsBaseSeed) {
  EXPECT_EQ(repeat_seed(42, 0), 42u);
  EXPECT_NE(repeat_seed(42, 1), 42u);
  EXPECT_NE(repeat_seed(42, 1), repeat_seed(42, 2));
}

TEST(Rng, ShuffleIsPermutation) {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng r(3);
  shuffle(v, r);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  std::vector<int> identity(50);
  for (int i = 0; i < 50; ++i) identity[i] = i;
  EXPECT_NE(v, identity);
}

TEST(GraphLoad, Triangle) {
  const auto lg = parse_edge_list("0 1\n1 2\n2 0\n");
  EXPECT_EQ(lg.graph.num_nodes(), 3u);
  EXPECT_EQ(lg.graph.num_edges(), 3u);
  for (node_t i = 0; i < 3; ++i) EXPECT_EQ(lg.graph.degree(i), 2u);
}

TEST(GraphLoad, CanonicalizesDuplicatesAndSelfLoops) {
  const auto lg = parse_edge_list("0 1\n1 0\n1 1\n");
  EXPECT_EQ(lg.graph.num_nodes(), 2u);
  EXPECT_EQ(lg.graph.num_edges(), 1u);
  EXPECT_EQ(lg.duplicates, 1u);
  EXPECT_EQ(lg.self_loops, 1u);
}

TEST(GraphLoad, CompactsIdsAndKeepsMap) {
  const auto lg = parse_edge_list("# comment\n10,30\n30 20\n");
  const auto& g = lg.graph;
  ASSERT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.original_id(0), 10);
  EXPECT_EQ(g.original_id(1), 20);
  EXPECT_EQ(g.original_id(2), 30);
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_FALSE(g.has_edge(0, 1));
}

TEST(GraphLoad, MalformedLineReportsLineNumber) {
  try {
    parse_edge_list("0 1\n1 2\nfoo bar\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_edge_list("0 1\n-1 2\n"), ParseError);
  EXPECT_THROW(parse_edge_list("0 1 2\n"), ParseError);
  EXPECT_THROW(parse_edge_list("0\n"), ParseError);
}

TEST(GraphLoad, EmptyInputIsError) {
  EXPECT_THROW(parse_edge_list(""), std::runtime_error);
  EXPECT_THROW(parse_edge_list("# only comments\n\n"), std::runtime_error);
  EXPECT_THROW(load_edge_list("/nonexistent/edges.txt"), std::runtime_error);
}

TEST(GraphLoad, RoundTripIsIdempotent) {
  Rng rng(5);
  const auto g = random_graph(60, 0.08, rng);
  const auto path = std::filesystem::temp_directory_path() / "trihet_roundtrip.tsv";
  write_edge_list(g, path);
  const auto g2 = load_edge_list(path).graph;
  write_edge_list(g2, path);
  const auto g3 = load_edge_list(path).graph;
  EXPECT_EQ(g2, g3);
  EXPECT_EQ(g2.hash(), g3.hash());
  std::filesystem::remove(path);
}

TEST(Graph, CsrInvariants) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_graph(40, 0.1, rng);
    for (node_t i = 0; i < g.num_nodes(); ++i) {
      const auto nb = g.neighbors(i);
      EXPECT_EQ(nb.size(), g.degree(i));
      for (std::size_t k = 0; k < nb.size(); ++k) {
        EXPECT_NE(nb[k], i);
        if (k > 0) EXPECT_LT(nb[k - 1], nb[k]);
        EXPECT_TRUE(g.has_edge(nb[k], i));
      }
    }
  }
}

TEST(Components, Examples) {
  auto tri = complete_graph(3);
  auto c = connected_components(tri);
  EXPECT_EQ(c.sizes, std::vector<std::size_t>({3}));

  auto two = make_graph(4, {{0, 1}, {2, 3}});
  c = connected_components(two);
  EXPECT_EQ(c.sizes, std::vector<std::size_t>({2, 2}));
  EXPECT_EQ(c.label[0], c.label[1]);
  EXPECT_NE(c.label[0], c.label[2]);
}

TEST(Components, SizesDescendingAndPartition) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_graph(50, 0.03, rng);
    const auto c = connected_components(g);
    std::size_t total = 0;
    for (std::size_t k = 0; k < c.sizes.size(); ++k) {
      total += c.sizes[k];
      if (k > 0) EXPECT_GE(c.sizes[k - 1], c.sizes[k]);
    }
    EXPECT_EQ(total, g.num_nodes());
    std::vector<std::size_t> count(c.sizes.size(), 0);
    for (auto l : c.label) ++count[l];
    EXPECT_EQ(count, c.sizes);
    for (const auto& e : g.edge_list()) EXPECT_EQ(c.label[e.u], c.label[e.v]);
  }
}

TEST(PairStats, CommonNeighborExamples) {
  EXPECT_EQ(common_neighbor_count(path_graph(3), 0, 2), 1u);
  EXPECT_EQ(common_neighbor_count(complete_graph(3), 0, 1), 1u);
  const auto star = star_graph(4);
  EXPECT_EQ(common_neighbor_count(star, 1, 2), 1u);
  EXPECT_EQ(common_neighbor_count(star, 0, 1), 0u);
  EXPECT_THROW(common_neighbor_count(star, 0, 9), std::out_of_range);
}

TEST(PairStats, DegreeDifferenceExamples) {
  EXPECT_EQ(degree_difference(star_graph(4), 0, 1), 3u);
  const auto ring = cycle_graph(6);
  for (node_t i = 0; i < 6; ++i)
    for (node_t j = 0; j < 6; ++j)
      if (i != j) EXPECT_EQ(degree_difference(ring, i, j), 0u);
  // degrees 7 and 2
  auto g = make_graph(10, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}, {8, 9}, {8, 1}});
  EXPECT_EQ(degree_difference(g, 0, 8), 5u);
  EXPECT_THROW(degree_difference(g, 10, 0), std::out_of_range);
}

TEST(PairStats, SymmetryAndBound) {
  Rng rng(13);
  const auto g = random_graph(30, 0.2, rng);
  for (node_t i = 0; i < 30; ++i)
    for (node_t j = 0; j < 30; ++j) {
      if (i == j) continue;
      EXPECT_EQ(common_neighbor_count(g, i, j), common_neighbor_count(g, j, i));
      EXPECT_EQ(degree_difference(g, i, j), degree_difference(g, j, i));
      EXPECT_LE(common_neighbor_count(g, i, j), std::min(g.degree(i), g.degree(j)));
    }
}

TEST(Clustering, Examples) {
  EXPECT_DOUBLE_EQ(global_clustering_coefficient(complete_graph(3)), 1.0);
  EXPECT_DOUBLE_EQ(global_clustering_coefficient(star_graph(4)), 0.0);
  EXPECT_DOUBLE_EQ(global_clustering_coefficient(path_graph(4)), 0.0);
  EXPECT_DOUBLE_EQ(global_clustering_coefficient(cycle_graph(8)), 0.0);
}

TEST(Clustering, MatchesTripleEnumeration) {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + rng.below(48);
    const auto g = random_graph(n, rng.uniform(0.02, 0.4), rng);
    const auto a = dense_adjacency(g);
    double closed = 0.0;  // ordered (center, a<b) connected triples that close
    double triples = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
          if (x == c || y == c || a(c, x) == 0 || a(c, y) == 0) continue;
          triples += 1.0;
          if (a(x, y) != 0) closed += 1.0;
        }
    const double expect = triples == 0.0 ? 0.0 : closed / triples;
    EXPECT_NEAR(global_clustering_coefficient(g), expect, 1e-12);
    EXPECT_EQ(static_cast<double>(triangle_count(g)) * 3.0, closed);
  }
}

TEST(DegreeCv, Examples) {
  EXPECT_DOUBLE_EQ(degree_cv(cycle_graph(5)), 0.0);
  // degrees [1, 1, 2]
  EXPECT_NEAR(degree_cv(path_graph(3)), std::sqrt(2.0 / 9.0) / (4.0 / 3.0), 1e-12);
  EXPECT_THROW(degree_cv(Graph()), std::invalid_argument);
  EXPECT_THROW(degree_cv(Graph::from_edges(3, {})), std::invalid_argument);
}

TEST(EgoSubgraph, Examples) {
  const auto tri = complete_graph(3);
  for (node_t r = 0; r < 3; ++r) EXPECT_EQ(khop_ego_subgraph_at(tri, r, 1).graph.num_nodes(), 3u);

  const auto p5 = path_graph(5);
  const auto sub = khop_ego_subgraph_at(p5, 0, 2);
  EXPECT_EQ(sub.graph.num_nodes(), 3u);
  EXPECT_EQ(sub.graph.num_edges(), 2u);
  EXPECT_EQ(sub.root, 0u);
  EXPECT_THROW(khop_ego_subgraph_at(p5, 0, 0), std::invalid_argument);
}

TEST(EgoSubgraph, CarriesIdMapAndIsInduced) {
  auto lg = parse_edge_list("100 101\n101 102\n102 103\n103 104\n100 102\n");
  const auto sub = khop_ego_subgraph_at(lg.graph, 4, 1);  // original 104
  ASSERT_EQ(sub.graph.num_nodes(), 2u);
  EXPECT_EQ(sub.graph.original_id(0), 103);
  EXPECT_EQ(sub.graph.original_id(1), 104);
  EXPECT_EQ(sub.graph.original_id(sub.root), 104);

  const auto sub2 = khop_ego_subgraph_at(lg.graph, 0, 1);  // 100, 101, 102 with all three edges
  EXPECT_EQ(sub2.graph.num_nodes(), 3u);
  EXPECT_EQ(sub2.graph.num_edges(), 3u);
}

TEST(EgoSubgraph, SeededRootIsReproducible) {
  Rng rng(21);
  const auto g = random_graph(200, 0.02, rng);
  const auto a = khop_ego_subgraph(g, 42, 2);
  const auto b = khop_ego_subgraph(g, 42, 2);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.root, b.root);
  EXPECT_EQ(std::vector<std::int64_t>(a.graph.original_ids().begin(), a.graph.original_ids().end()),
            std::vector<std::int64_t>(b.graph.original_ids().begin(), b.graph.original_ids().end()));
  // Every member is within two hops of the root in the parent.
  const auto d = bfs_distances(g, static_cast<node_t>(a.graph.original_id(a.root)));
  for (node_t i = 0; i < a.graph.num_nodes(); ++i) {
    const auto dist = d[static_cast<std::size_t>(a.graph.original_id(i))];
    EXPECT_GE(dist, 0);
    EXPECT_LE(dist, 2);
  }
}

TEST(Bfs, Distances) {
  const auto g = make_graph(5, {{0, 1}, {1, 2}, {3, 4}});
  const auto d = bfs_distances(g, 0);
  EXPECT_EQ(d, std::vector<std::int32_t>({0, 1, 2, -1, -1}));
}
