#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace rideshare;
using test_support::cost_graph;

namespace {

// Best total weight over all matchings, by enumeration.
blossom::Weight brute_matching_weight(std::size_t n, const std::vector<blossom::WeightedEdge>& edges,
                                      std::vector<char>& used, Index from) {
  while (from < n && used[from]) ++from;
  if (from == n) return 0;
  used[from] = 1;
  blossom::Weight best = brute_matching_weight(n, edges, used, from + 1);
  for (const auto& e : edges) {
    Index other;
    if (e.u == from) {
      other = e.v;
    } else if (e.v == from) {
      other = e.u;
    } else {
      continue;
    }
    if (used[other]) continue;
    used[other] = 1;
    best = std::max(best, e.weight + brute_matching_weight(n, edges, used, from + 1));
    used[other] = 0;
  }
  used[from] = 0;
  return best;
}

}  // namespace

TEST(Blossom, MatchesEnumerationOnRandomGraphs) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 400; ++round) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<blossom::WeightedEdge> edges;
    for (Index u = 0; u < n; ++u) {
      for (Index v = u + 1; v < n; ++v) {
        if (rng() % 100 < 55) edges.push_back({u, v, static_cast<blossom::Weight>(1 + rng() % (round % 2 ? 5 : 1000))});
      }
    }
    const auto mate = blossom::max_weight_matching(n, edges);
    ASSERT_EQ(mate.size(), n);
    blossom::Weight total = 0;
    for (const auto& e : edges) {
      if (mate[e.u] == e.v) {
        ASSERT_EQ(mate[e.v], e.u);
        total += e.weight;
      }
    }
    for (Index v = 0; v < n; ++v) {
      if (mate[v] != kNoIndex) {
        ASSERT_EQ(mate[mate[v]], v);
      }
    }
    std::vector<char> used(n, 0);
    EXPECT_TRUE(total == brute_matching_weight(n, edges, used, 0)) << "round " << round;
  }
}

TEST(SocialOptimum, WorkedExample) {
  const auto f = test_support::load_fig2();
  const auto opt = social_optimum(f.graph);
  EXPECT_EQ(opt.social_cost, 14.0);
  ASSERT_EQ(opt.pairs.size(), 2u);
  EXPECT_EQ(opt.pairs[0], std::pair(f.i(), f.k()));
  EXPECT_EQ(opt.pairs[1], std::pair(f.j(), f.l()));
  EXPECT_EQ(brute_force_optimum(f.graph), opt);
}

TEST(SocialOptimum, NegativeSavingsStayApart) {
  const auto g = cost_graph({5, 5}, {{0, 1, 11}});
  const auto opt = social_optimum(g);
  EXPECT_TRUE(opt.pairs.empty());
  EXPECT_DOUBLE_EQ(opt.social_cost, 10.0);
  EXPECT_EQ(brute_force_optimum(g), opt);
}

TEST(SocialOptimum, EmptyAndSingle) {
  const auto empty = cost_graph({}, {});
  EXPECT_EQ(social_optimum(empty).social_cost, 0.0);
  EXPECT_TRUE(brute_force_optimum(empty).singletons.empty());
  const auto one = cost_graph({2}, {});
  EXPECT_EQ(brute_force_optimum(one).singletons, std::vector<Index>{0});
  EXPECT_EQ(social_optimum(one).singletons, std::vector<Index>{0});
}

TEST(SocialOptimum, EqualSavingsTieBreak) {
  std::vector<test_support::CostEdge> k4;
  for (Index a = 0; a < 4; ++a) {
    for (Index b = a + 1; b < 4; ++b) k4.push_back({a, b, 6});
  }
  const auto g = cost_graph({4, 4, 4, 4}, k4);
  const auto bf = brute_force_optimum(g);
  EXPECT_EQ(bf.pairs, (std::vector<std::pair<Index, Index>>{{0, 1}, {2, 3}}));
  EXPECT_DOUBLE_EQ(social_optimum(g).social_cost, bf.social_cost);
}

TEST(SocialOptimum, BruteForceRefusesLargeInstances) {
  const auto g = cost_graph(std::vector<double>(13, 1.0), {});
  EXPECT_THROW(brute_force_optimum(g), InputError);
}

TEST(SavingsGraph, MirrorsEdges) {
  const auto inst = test_support::random_geo_instance(4242, 15);
  const auto s = savings_graph(inst.graph);
  ASSERT_EQ(s.weighted_edges.size(), inst.graph.edges().size());
  for (const auto& e : s.weighted_edges) {
    EXPECT_LE(e.savings, std::min(inst.graph.self_cost(e.i), inst.graph.self_cost(e.j)) + 1e-9);
  }
}

class OracleSeeds : public ::testing::TestWithParam<int> {};

TEST_P(OracleSeeds, BlossomAgreesWithEnumeration) {
  const auto inst = test_support::random_geo_instance(31'000 + GetParam(), 1 + GetParam() % 12);
  const auto& g = inst.graph;
  const auto fast = social_optimum(g);
  const auto slow = brute_force_optimum(g);
  EXPECT_NEAR(fast.social_cost, slow.social_cost, 1e-9);
  EXPECT_NEAR(social_cost(g, fast), cost_via_savings(g, fast), 1e-9);
  // The optimum bounds every stable outcome from below.
  for (auto m : kAllMechanisms) {
    const auto out = stable_match(build_preferences(m, g), g);
    if (const auto* ok = std::get_if<StableMatch>(&out)) {
      EXPECT_GE(ok->assignment.social_cost, fast.social_cost - 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OracleSeeds, ::testing::Range(0, 80));
