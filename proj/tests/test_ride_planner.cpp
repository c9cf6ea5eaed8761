#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace rideshare;

namespace {

struct LineFixture {
  RoadNetwork net;
  std::vector<Index> terminals;
  LineFixture() {
    for (const char* n : {"A", "B", "C"}) net.add_junction(n);
    net.add_segment("A", "B", 2, 60);
    net.add_segment("B", "C", 3, 60);
    terminals = {net.require("A"), net.require("C")};
  }
};

TripRequest trip(std::string id, Index s, Index d, double from, double to) {
  return TripRequest{std::move(id), s, d, from, to};
}

}  // namespace

TEST(PlanStandalone, LineRoute) {
  LineFixture f;
  RoadTravelModel model(f.net, f.terminals);
  auto plan = plan_standalone(model, trip("a", f.terminals[0], f.terminals[1], 0, 1000));
  ASSERT_TRUE(plan);
  EXPECT_DOUBLE_EQ(plan->total_cost, 5.0);
  EXPECT_DOUBLE_EQ(plan->waypoints.back().arrival, 120.0);
  EXPECT_FALSE(plan_standalone(model, trip("a", f.terminals[0], f.terminals[1], 0, 100)));
}

TEST(Fig2Graph, CostsAndShapes) {
  const auto f = test_support::load_fig2();
  const auto& g = f.graph;
  EXPECT_DOUBLE_EQ(g.self_cost(f.i()), 4.0);
  EXPECT_DOUBLE_EQ(g.self_cost(f.k()), 4.9);
  ASSERT_EQ(g.edges().size(), 3u);

  const auto& ij = g.edge(*g.edge_between(f.i(), f.j()));
  EXPECT_DOUBLE_EQ(ij.cost, 6.5);
  EXPECT_EQ(ij.plan.kind, RideKind::kCombined);

  const auto& ik = g.edge(*g.edge_between(f.i(), f.k()));
  EXPECT_DOUBLE_EQ(ik.cost, 7.0);
  EXPECT_EQ(ik.plan.kind, RideKind::kHitchhiking);
  // i rides inside k's trip; i's own leg costs 4.
  const int x = ik.plan.first_party;
  EXPECT_EQ(x == 0 ? ik.i : ik.j, f.i());
  EXPECT_DOUBLE_EQ(ik.plan.cost_between(ik.plan.position_of(x, true), ik.plan.position_of(x, false)), 4.0);

  EXPECT_DOUBLE_EQ(g.edge(*g.edge_between(f.j(), f.l())).cost, 7.0);
  EXPECT_FALSE(g.edge_between(f.k(), f.l()));
  EXPECT_FALSE(g.edge_between(f.i(), f.l()));
  EXPECT_FALSE(g.edge_between(f.j(), f.k()));
  for (const auto& e : g.edges()) EXPECT_EQ(check_sharable(e.plan, g.commuter(e.i), g.commuter(e.j)), "");
}

TEST(PairRides, IdenticalTripsShareAtStandaloneCost) {
  GeometricModel model(FareModel{2.5, 1.55, 20});
  const Index s = model.add_point({-73.99, 40.75});
  const Index d = model.add_point({-73.95, 40.78});
  const auto a = trip("a", s, d, 0, 3600);
  const auto b = trip("b", s, d, 0, 3600);
  const double solo = plan_standalone(model, a)->total_cost;
  auto best = min_cost_sharable_ride(model, a, b);
  ASSERT_TRUE(best);
  EXPECT_NEAR(best->total_cost, solo, 1e-9);
  EXPECT_EQ(check_sharable(*best, a, b), "");
}

TEST(PairRides, DisjointWindowsGiveNothing) {
  GeometricModel model(FareModel{0, 1, 20});
  const Index s1 = model.add_point({-73.99, 40.75});
  const Index d1 = model.add_point({-73.98, 40.75});
  const Index s2 = model.add_point({-73.97, 40.75});
  const Index d2 = model.add_point({-73.96, 40.75});
  const double t1 = plan_standalone(model, trip("a", s1, d1, 0, 1e6))->waypoints.back().arrival;
  const auto a = trip("a", s1, d1, 0, t1);
  const auto b = trip("b", s2, d2, 10'000, 20'000);
  EXPECT_TRUE(plan_pair_rides(model, a, b).empty());
}

TEST(BuildGraph, WindowAndSingletons) {
  GeometricModel model(FareModel{0, 1, 20});
  std::vector<TripRequest> trips;
  for (int k = 0; k < 3; ++k) {
    const Index s = model.add_point({-73.99 + 0.001 * k, 40.75});
    const Index d = model.add_point({-73.95, 40.78 + 0.001 * k});
    trips.push_back(trip("t" + std::to_string(k), s, d, 100.0 * k, 100.0 * k + 7200));
  }
  EXPECT_EQ(build_matching_graph(model, trips).edges().size(), 3u);
  EXPECT_EQ(build_matching_graph(model, trips, 0.0).edges().size(), 0u);
  EXPECT_EQ(build_matching_graph(model, trips, 150.0).edges().size(), 2u);
  auto one = build_matching_graph(model, {trips[0]});
  EXPECT_EQ(one.size(), 1u);
  EXPECT_TRUE(one.edges().empty());
}

TEST(BuildGraph, RejectsUnroutableAndDuplicates) {
  GeometricModel model(FareModel{0, 1, 20});
  const Index s = model.add_point({-73.99, 40.75});
  const Index d = model.add_point({-73.90, 40.85});
  auto g = build_matching_graph(model, {trip("late", s, d, 0, 1), trip("ok", s, d, 0, 1e5)});
  EXPECT_EQ(g.size(), 1u);
  ASSERT_EQ(g.rejections().size(), 1u);
  EXPECT_EQ(g.rejections()[0].commuter_id, "late");
  EXPECT_THROW(build_matching_graph(model, {trip("x", s, d, 0, 1e5), trip("x", s, d, 0, 1e5)}), InputError);
  EXPECT_THROW(build_matching_graph(model, {trip("x", s, s, 0, 1e5)}), InputError);
}

TEST(Builder, RejectsSharedRideCheaperThanStandalone) {
  MatchingGraph::Builder b;
  SharedRidePlan solo;
  solo.total_cost = 5;
  b.add_commuter({"a", 0, 1, 0, 10}, solo);
  b.add_commuter({"b", 2, 3, 0, 10}, solo);
  SharedRidePlan shared;
  shared.total_cost = 4;
  b.add_edge({0, 1, 4.0, shared, std::nullopt});
  EXPECT_THROW(std::move(b).finish(), InvariantError);
}

class RandomPairs : public ::testing::TestWithParam<int> {};

TEST_P(RandomPairs, PlansAreSharableAndSymmetric) {
  const auto inst = test_support::random_geo_instance(900 + GetParam(), 12);
  const auto& trips = inst.trips;
  for (std::size_t a = 0; a < trips.size(); ++a) {
    for (std::size_t b = a + 1; b < trips.size(); ++b) {
      const auto ab = min_cost_sharable_ride(inst.model, trips[a], trips[b]);
      const auto ba = min_cost_sharable_ride(inst.model, trips[b], trips[a]);
      ASSERT_EQ(ab.has_value(), ba.has_value());
      if (!ab) continue;
      EXPECT_NEAR(ab->total_cost, ba->total_cost, 1e-9);
      EXPECT_EQ(check_sharable(*ab, trips[a], trips[b]), "");
      const double ca = plan_standalone(inst.model, trips[a])->total_cost;
      const double cb = plan_standalone(inst.model, trips[b])->total_cost;
      EXPECT_GE(ab->total_cost, std::max(ca, cb) - 1e-9);
      for (const auto& p : plan_pair_rides(inst.model, trips[a], trips[b])) {
        EXPECT_EQ(check_sharable(p, trips[a], trips[b]), "");
        EXPECT_GE(p.total_cost, ab->total_cost - 1e-9);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomPairs, ::testing::Range(0, 6));
