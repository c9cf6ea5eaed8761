#ifndef RIDESHARE_TESTS_SUPPORT_HPP_
#define RIDESHARE_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rideshare/rideshare.hpp"

namespace rideshare::test_support {

inline std::string data_path(const std::string& rel) { return std::string(RIDESHARE_DATA_DIR) + "/" + rel; }

/// Road network of the four-commuter worked example, plus its requests.
struct Fig2 {
  RoadNetwork net;
  std::vector<TripRequest> trips;
  MatchingGraph graph;

  Index i() const { return *graph.find("i"); }
  Index j() const { return *graph.find("j"); }
  Index k() const { return *graph.find("k"); }
  Index l() const { return *graph.find("l"); }
};

inline Fig2 load_fig2() {
  Fig2 f;
  std::ifstream net_in(data_path("fig2/network.csv"));
  f.net = load_road_network(net_in);
  std::ifstream req_in(data_path("fig2/requests.csv"));
  f.trips = load_road_requests(req_in, f.net);
  std::vector<Index> terminals;
  for (const auto& t : f.trips) {
    terminals.push_back(t.source);
    terminals.push_back(t.destination);
  }
  const RoadTravelModel model(f.net, terminals);
  f.graph = build_matching_graph(model, f.trips);
  return f;
}

/// Random geometric instance: n trips in a ~6 km box, departures spread over
/// 20 minutes, generous deadlines. The fare base varies with the seed.
struct GeoInstance {
  GeometricModel model{FareModel{}};
  std::vector<TripRequest> trips;
  MatchingGraph graph;
};

inline GeoInstance random_geo_instance(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  const auto u = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
  const double bases[] = {0.0, 1.0, 2.5};
  FareModel fare{bases[rng() % 3], 1.55, 20.0};
  GeoInstance inst{GeometricModel(fare), {}, {}};
  for (std::size_t k = 0; k < n; ++k) {
    TripRequest t;
    t.commuter_id = "c" + std::to_string(100 + k);
    const LonLat s{u(-74.00, -73.93), u(40.72, 40.77)};
    const LonLat d{u(-74.00, -73.93), u(40.72, 40.77)};
    t.source = inst.model.add_point(s);
    t.destination = inst.model.add_point(d);
    const double direct_s = great_circle_km(s, d) / fare.mean_speed_kmh * 3600.0;
    t.earliest_departure = std::floor(u(0.0, 1200.0));
    t.latest_arrival = t.earliest_departure + direct_s * u(1.2, 2.5) + u(0.0, 900.0);
    inst.trips.push_back(std::move(t));
  }
  inst.graph = build_matching_graph(inst.model, inst.trips);
  return inst;
}

/// Cost-level graph: commuters "c00", "c01", ... with the given standalone
/// costs and pair edges (i, j, c_ij). Plans are combined rides whose middle
/// leg carries the whole cost.
struct CostEdge {
  Index i;
  Index j;
  double cost;
};

inline MatchingGraph cost_graph(const std::vector<double>& self_costs, const std::vector<CostEdge>& edges) {
  MatchingGraph::Builder b;
  for (std::size_t k = 0; k < self_costs.size(); ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "c%02zu", k);
    SharedRidePlan solo;
    solo.total_cost = self_costs[k];
    solo.segment_costs = {self_costs[k]};
    solo.rider_distance_km = {1.0, 0.0};
    b.add_commuter(TripRequest{id, 2 * k, 2 * k + 1, 0.0, 1.0}, solo);
  }
  for (const auto& e : edges) {
    SharedRidePlan plan;
    plan.kind = RideKind::kCombined;
    plan.segment_costs = {0.0, e.cost, 0.0};
    plan.total_cost = e.cost;
    plan.rider_distance_km = {1.0, 1.0};
    b.add_edge({e.i, e.j, e.cost, plan, std::nullopt});
  }
  return std::move(b).finish();
}

}  // namespace rideshare::test_support

#endif  // RIDESHARE_TESTS_SUPPORT_HPP_
