#include <gtest/gtest.h>

#include "support.hpp"

using namespace rideshare;
using test_support::cost_graph;

TEST(OptimalityRatio, WorkedExample) {
  const auto f = test_support::load_fig2();
  const auto& g = f.graph;
  const auto stable = std::get<StableMatch>(stable_match(build_preferences(Mechanism::kEqual, g), g)).assignment;
  const auto opt = social_optimum(g);
  EXPECT_NEAR(optimality_ratio(stable, opt), 16.3 / 14.0, 1e-12);
  EXPECT_DOUBLE_EQ(optimality_ratio(opt, opt), 1.0);
}

TEST(OptimalityRatio, RejectsDifferentCommuterSets) {
  Assignment a, b;
  a.singletons = {0, 1};
  a.social_cost = 2;
  b.singletons = {0};
  b.social_cost = 1;
  EXPECT_THROW(optimality_ratio(a, b), InputError);
}

TEST(Distributions, WorkedExampleUnderEqualSplit) {
  const auto f = test_support::load_fig2();
  const auto& g = f.graph;
  const auto stable = std::get<StableMatch>(stable_match(build_preferences(Mechanism::kEqual, g), g)).assignment;
  const auto r = evaluate_mechanism(stable, social_optimum(g), Mechanism::kEqual, g);
  EXPECT_NEAR(r.social_cost, 16.3, 1e-9);
  EXPECT_NEAR(r.optimal_cost, 14.0, 1e-9);
  EXPECT_EQ(r.matched_pairs, 1u);
  EXPECT_EQ(r.matched_commuters, 2u);
  EXPECT_EQ(r.unmatched_commuters, 2u);
  EXPECT_DOUBLE_EQ(r.matched_fraction, 0.5);
  ASSERT_EQ(r.normalized_utilities.size(), 2u);
  EXPECT_NEAR(r.normalized_utilities[0], 0.75 / 4.0, 1e-12);
  ASSERT_EQ(r.standalone_cost_ratios.size(), 1u);
  EXPECT_DOUBLE_EQ(r.standalone_cost_ratios[0], 1.0);
  // Road distances equal costs: i rides 1 + 4.5 = 5.5 against its own 4.
  ASSERT_EQ(r.delay_ratios.size(), 1u);
  EXPECT_NEAR(r.delay_ratios[0], 5.5 / 4.0, 1e-12);
  double standalone = 0;
  for (Index i = 0; i < g.size(); ++i) standalone += g.self_cost(i);
  EXPECT_NEAR(r.social_utility, standalone - r.social_cost, 1e-9);
  EXPECT_TRUE(r.separation_distances_km.empty());
}

TEST(Distributions, ZeroUtilityAndIdenticalTrips) {
  // Payment equal to standalone cost gives normalized utility 0.
  const auto g = cost_graph({5, 5}, {{0, 1, 10}});
  Assignment a;
  a.pairs = {{0, 1}};
  a.social_cost = 10;
  const auto r = commuter_distributions(a, Mechanism::kEqual, g);
  EXPECT_DOUBLE_EQ(r.normalized_utilities[0], 0.0);
  EXPECT_DOUBLE_EQ(r.standalone_cost_ratios[0], 1.0);

  GeometricModel model(FareModel{2.5, 1.55, 20});
  const Index s = model.add_point({-73.99, 40.75});
  const Index d = model.add_point({-73.95, 40.78});
  auto same = build_matching_graph(model, {{"a", s, d, 0, 3600}, {"b", s, d, 0, 3600}});
  Assignment both;
  both.pairs = {{0, 1}};
  both.social_cost = same.edge(0).cost;
  const auto rs = commuter_distributions(both, Mechanism::kEgalitarian, same);
  EXPECT_NEAR(rs.delay_ratios[0], 1.0, 1e-12);
  EXPECT_NEAR(rs.separation_distances_km[0], 0.0, 1e-12);
}

class RandomMetrics : public ::testing::TestWithParam<int> {};

TEST_P(RandomMetrics, BoundsHold) {
  const auto inst = test_support::random_geo_instance(123 + GetParam(), 20);
  const auto& g = inst.graph;
  const auto opt = social_optimum(g);
  for (auto m : kAllMechanisms) {
    const auto out = stable_match(build_preferences(m, g), g);
    const auto* ok = std::get_if<StableMatch>(&out);
    if (!ok) continue;
    const auto r = evaluate_mechanism(ok->assignment, opt, m, g);
    EXPECT_GE(r.optimality_ratio, 1.0 - 1e-9);
    EXPECT_LE(r.optimality_ratio, 1.5 + 1e-9);
    double standalone = 0;
    for (Index i = 0; i < g.size(); ++i) standalone += g.self_cost(i);
    EXPECT_NEAR(r.social_utility, standalone - r.social_cost, 1e-9);
    for (double d : r.delay_ratios) EXPECT_GE(d, 1.0 - 1e-9);
    for (double s : r.standalone_cost_ratios) {
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
    for (double u : r.normalized_utilities) {
      EXPECT_LT(u, 1.0);
      if (m == Mechanism::kEgalitarian || m == Mechanism::kProportional) {
        EXPECT_GE(u, -1e-9);
      }
      if (m == Mechanism::kProportional) {
        EXPECT_LE(u, 0.5 + 1e-9);
      }
    }
    EXPECT_EQ(r.separation_distances_km.size(), r.matched_pairs);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomMetrics, ::testing::Range(0, 40));
