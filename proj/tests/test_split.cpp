#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "test_support.hpp"
#include "trihet/split.hpp"

using namespace trihet;
using namespace trihet::testing;

namespace {

std::set<NodePair> as_set(const std::vector<NodePair>& v) { return {v.begin(), v.end()}; }

void expect_split_invariants(const Graph& g, const LinkSplit& s) {
  const auto counts = split_counts(g.num_edges(), s.ratios);
  EXPECT_EQ(s.train_pos.size(), counts[0]);
  EXPECT_EQ(s.val_pos.size(), counts[1]);
  EXPECT_EQ(s.test_pos.size(), counts[2]);
  EXPECT_EQ(s.val_neg.size(), s.val_pos.size());
  EXPECT_EQ(s.test_neg.size(), s.test_pos.size());

  // Positives partition E.
  std::set<NodePair> all;
  for (const auto* part : {&s.train_pos, &s.val_pos, &s.test_pos})
    for (const auto& p : *part) {
      EXPECT_LT(p.u, p.v);
      EXPECT_TRUE(all.insert(p).second) << "pair in two positive sets";
    }
  EXPECT_EQ(all, as_set(g.edge_list()));

  // Negatives: non-edges, no self-pairs, each in exactly one set.
  std::set<NodePair> negs;
  for (const auto* part : {&s.val_neg, &s.test_neg})
    for (const auto& p : *part) {
      EXPECT_LT(p.u, p.v);
      EXPECT_FALSE(g.has_edge(p.u, p.v));
      EXPECT_TRUE(negs.insert(p).second) << "negative pair repeated";
    }

  // Training graph holds exactly the training positives.
  EXPECT_EQ(s.train_graph.num_nodes(), g.num_nodes());
  EXPECT_EQ(as_set(s.train_graph.edge_list()), as_set(s.train_pos));
  for (const auto& p : s.val_pos) EXPECT_FALSE(s.train_graph.has_edge(p.u, p.v));
  for (const auto& p : s.test_pos) EXPECT_FALSE(s.train_graph.has_edge(p.u, p.v));
}

}  // namespace

TEST(SplitCounts, RoundingRule) {
  const auto c = split_counts(5278, {});
  EXPECT_EQ(c[2], 528u);
  EXPECT_EQ(c[1], 264u);
  EXPECT_EQ(c[0], 5278u - 528u - 264u);
  const auto d = split_counts(10, {});
  EXPECT_EQ(d[0] + d[1] + d[2], 10u);
}

TEST(Split, RejectsDegenerateRatios) {
  Rng rng(1);
  const auto g = random_graph(50, 0.2, rng);
  EXPECT_THROW(random_link_split(g, {1.0, 0.0, 0.0}, 42), std::invalid_argument);
  EXPECT_THROW(random_link_split(g, {0.5, 0.2, 0.2}, 42), std::invalid_argument);
  EXPECT_THROW(random_link_split(path_graph(3), {}, 42), std::invalid_argument);
}

TEST(Split, NearCompleteGraphExhaustsBudget) {
  // 21 edges, no non-edges left for negatives.
  EXPECT_THROW(random_link_split(complete_graph(7), {0.6, 0.2, 0.2}, 42), std::runtime_error);
}

TEST(Split, DeterministicForSeed) {
  Rng rng(2);
  const auto g = random_graph(120, 0.05, rng);
  const auto a = random_link_split(g, {}, 42);
  const auto b = random_link_split(g, {}, 42);
  const auto c = random_link_split(g, {}, 43);
  EXPECT_EQ(a.train_pos, b.train_pos);
  EXPECT_EQ(a.val_neg, b.val_neg);
  EXPECT_EQ(a.test_pos, b.test_pos);
  EXPECT_EQ(a.test_neg, b.test_neg);
  EXPECT_EQ(a.eval_pairs_hash(), b.eval_pairs_hash());
  EXPECT_NE(a.eval_pairs_hash(), c.eval_pairs_hash());
}

TEST(Split, InvariantsOnRandomGraphsAndSeeds) {
  Rng rng(3);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const std::size_t n = 30 + rng.below(120);
    const auto g = random_graph(n, rng.uniform(0.03, 0.15), rng);
    if (g.num_edges() < 40) continue;
    const auto s = random_link_split(g, {}, 1000 + t);
    expect_split_invariants(g, s);
  }
}

TEST(Split, FractionsWithinTolerance) {
  Rng rng(4);
  const auto g = random_graph(200, 0.05, rng);
  const double e = static_cast<double>(g.num_edges());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_link_split(g, {}, seed);
    EXPECT_NEAR(s.train_pos.size() / e, 0.85, 0.02);
    EXPECT_NEAR(s.val_pos.size() / e, 0.05, 0.02);
    EXPECT_NEAR(s.test_pos.size() / e, 0.10, 0.02);
  }
}

TEST(TrainingNegatives, Contract) {
  Rng rng(5);
  const auto g = random_graph(150, 0.05, rng);
  const auto s = random_link_split(g, {}, 42);
  const auto held = [&] {
    auto v = as_set(s.val_neg);
    for (const auto& p : s.test_neg) v.insert(p);
    return v;
  }();
  const auto n0 = sample_training_negatives(s, 0);
  const auto n1 = sample_training_negatives(s, 1);
  EXPECT_EQ(n0.size(), s.train_pos.size());
  EXPECT_EQ(n0, sample_training_negatives(s, 0));
  EXPECT_NE(n0, n1);
  EXPECT_EQ(as_set(n0).size(), n0.size());
  for (const auto& p : n0) {
    EXPECT_NE(p.u, p.v);
    EXPECT_FALSE(g.has_edge(p.u, p.v));
    EXPECT_EQ(held.count(p), 0u);
  }
}

TEST(SplitFile, RoundTrip) {
  Rng rng(6);
  const auto g = random_graph(80, 0.08, rng);
  const auto s = random_link_split(g, {}, 42);
  const auto path = std::filesystem::temp_directory_path() / "trihet_split.txt";
  save_split(s, path);
  const auto r = load_split(path, g);
  EXPECT_EQ(r.train_pos, s.train_pos);
  EXPECT_EQ(r.val_pos, s.val_pos);
  EXPECT_EQ(r.val_neg, s.val_neg);
  EXPECT_EQ(r.test_pos, s.test_pos);
  EXPECT_EQ(r.test_neg, s.test_neg);
  EXPECT_EQ(r.seed, s.seed);
  EXPECT_EQ(r.train_graph, s.train_graph);
  EXPECT_EQ(sample_training_negatives(r, 3), sample_training_negatives(s, 3));

  const auto other = random_graph(80, 0.08, rng);
  EXPECT_THROW(load_split(path, other), std::runtime_error);
  std::filesystem::remove(path);
}
