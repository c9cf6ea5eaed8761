#ifndef RIDESHARE_RIDE_PLANNER_HPP_
#define RIDESHARE_RIDE_PLANNER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/travel_model.hpp"

namespace rideshare {

struct TripRequest {
  std::string commuter_id;
  Index source = 0;
  Index destination = 0;
  double earliest_departure = 0.0;  // epoch seconds
  double latest_arrival = 0.0;      // epoch seconds
};

inline void validate_trip(const TripRequest& t) {
  if (t.commuter_id.empty()) throw InputError("trip has an empty commuter id");
  if (t.source == t.destination) throw InputError("trip '" + t.commuter_id + "' has source == destination");
  if (!std::isfinite(t.earliest_departure) || !std::isfinite(t.latest_arrival) ||
      !(t.earliest_departure < t.latest_arrival)) {
    throw InputError("trip '" + t.commuter_id + "' needs earliest_departure < latest_arrival");
  }
}

enum class RideKind { kStandalone, kHitchhiking, kCombined };

inline const char* to_string(RideKind kind) {
  switch (kind) {
    case RideKind::kStandalone: return "standalone";
    case RideKind::kHitchhiking: return "hitchhiking";
    case RideKind::kCombined: return "combined";
  }
  return "?";
}

/// Within a pair plan, party 0 is the first trip handed to the planner and
/// party 1 the second. Standalone plans only use party 0.
struct Waypoint {
  Index location = 0;
  int party = 0;
  bool pickup = true;
  double arrival = 0.0;
};

/// A concrete ride: ordered waypoints, their schedule and per-leg costs.
///
/// `first_party` follows the (first; second) naming of ride shapes:
/// for hitchhiking, the first party's whole trip nests inside the second's;
/// for combined, the first party is picked up and dropped off first.
struct SharedRidePlan {
  RideKind kind = RideKind::kStandalone;
  int first_party = 0;
  std::vector<Waypoint> waypoints;
  std::vector<double> segment_costs;        // one per consecutive waypoint pair
  std::vector<double> segment_distance_km;  // same indexing
  double total_cost = 0.0;
  std::array<double, 2> rider_distance_km{0.0, 0.0};

  int second_party() const { return 1 - first_party; }

  /// Cost of the sub-route between two waypoint positions (from < to).
  double cost_between(std::size_t from, std::size_t to) const {
    double sum = 0.0;
    for (std::size_t k = from; k < to; ++k) sum += segment_costs[k];
    return sum;
  }

  std::size_t position_of(int party, bool pickup) const {
    for (std::size_t k = 0; k < waypoints.size(); ++k) {
      if (waypoints[k].party == party && waypoints[k].pickup == pickup) return k;
    }
    throw InvariantError("plan is missing a waypoint for party " + std::to_string(party));
  }
};

/// Minimum time charged for a leg between distinct waypoints whose route has
/// zero duration, so that waypoint arrival times stay strictly ordered.
inline constexpr double kMinLegSeconds = 1.0;

namespace detail {

struct Stop {
  int party;
  bool pickup;
};

inline Index stop_location(const Stop& s, const TripRequest& a, const TripRequest& b) {
  const TripRequest& t = s.party == 0 ? a : b;
  return s.pickup ? t.source : t.destination;
}

/// Forward-pass schedule: depart the first pickup at that rider's earliest
/// departure, wait at pickups when early, never wait at drop-offs.
template <TravelModel Model>
std::optional<SharedRidePlan> schedule(const Model& model, const TripRequest& a, const TripRequest& b,
                                       std::span<const Stop> stops, RideKind kind, int first_party) {
  SharedRidePlan plan;
  plan.kind = kind;
  plan.first_party = first_party;
  const auto trip_of = [&](int party) -> const TripRequest& { return party == 0 ? a : b; };

  double t = trip_of(stops[0].party).earliest_departure;
  plan.waypoints.push_back({stop_location(stops[0], a, b), stops[0].party, stops[0].pickup, t});
  for (std::size_t k = 1; k < stops.size(); ++k) {
    const Index from = plan.waypoints.back().location;
    const Index to = stop_location(stops[k], a, b);
    const auto leg = model.leg(from, to);
    if (!leg) return std::nullopt;
    t += leg->travel_time > 0.0 ? leg->travel_time : kMinLegSeconds;
    const TripRequest& rider = trip_of(stops[k].party);
    if (stops[k].pickup) {
      t = std::max(t, rider.earliest_departure);
    } else if (t > rider.latest_arrival + kTolerance) {
      return std::nullopt;
    }
    plan.waypoints.push_back({to, stops[k].party, stops[k].pickup, t});
    plan.segment_costs.push_back(leg->cost);
    plan.segment_distance_km.push_back(leg->distance_km);
    plan.total_cost += leg->cost;
  }
  for (int party = 0; party < 2; ++party) {
    bool onboard = false;
    for (std::size_t k = 0; k + 1 < plan.waypoints.size(); ++k) {
      const auto& w = plan.waypoints[k];
      if (w.party == party) onboard = w.pickup;
      if (onboard) plan.rider_distance_km[party] += plan.segment_distance_km[k];
    }
  }
  return plan;
}

}  // namespace detail

template <TravelModel Model>
std::optional<SharedRidePlan> plan_standalone(const Model& model, const TripRequest& trip) {
  const std::array<detail::Stop, 2> stops{{{0, true}, {0, false}}};
  return detail::schedule(model, trip, trip, stops, RideKind::kStandalone, 0);
}

/// Every time-feasible pair ride, in the fixed order
/// hitchhiking(a;b), hitchhiking(b;a), combined(a;b), combined(b;a).
template <TravelModel Model>
std::vector<SharedRidePlan> plan_pair_rides(const Model& model, const TripRequest& a, const TripRequest& b) {
  struct Ordering {
    RideKind kind;
    int first;
    std::array<detail::Stop, 4> stops;
  };
  // (x;y)-hitchhiking visits s_y, s_x, d_x, d_y; (x;y)-combined visits s_x, s_y, d_x, d_y.
  static constexpr std::array<Ordering, 4> kOrderings{{
      {RideKind::kHitchhiking, 0, {{{1, true}, {0, true}, {0, false}, {1, false}}}},
      {RideKind::kHitchhiking, 1, {{{0, true}, {1, true}, {1, false}, {0, false}}}},
      {RideKind::kCombined, 0, {{{0, true}, {1, true}, {0, false}, {1, false}}}},
      {RideKind::kCombined, 1, {{{1, true}, {0, true}, {1, false}, {0, false}}}},
  }};
  std::vector<SharedRidePlan> plans;
  for (const auto& o : kOrderings) {
    if (auto plan = detail::schedule(model, a, b, o.stops, o.kind, o.first)) plans.push_back(std::move(*plan));
  }
  return plans;
}

/// Cheapest feasible pair ride; equal costs keep the earlier ordering.
template <TravelModel Model>
std::optional<SharedRidePlan> min_cost_sharable_ride(const Model& model, const TripRequest& a,
                                                     const TripRequest& b) {
  auto plans = plan_pair_rides(model, a, b);
  std::optional<SharedRidePlan> best;
  for (auto& p : plans) {
    if (!best || definitely_less(p.total_cost, best->total_cost)) best = std::move(p);
  }
  return best;
}

/// Independent re-check of a pair plan against the sharable-ride definition:
/// location and temporal constraints, the strict order implied by its shape,
/// and cost bookkeeping. Returns an empty string when the plan is valid.
inline std::string check_sharable(const SharedRidePlan& plan, const TripRequest& a, const TripRequest& b) {
  if (plan.waypoints.size() != 4 || plan.segment_costs.size() != 3) return "pair plan must have 4 waypoints";
  double sum = 0.0;
  for (double c : plan.segment_costs) {
    if (c < 0.0) return "negative leg cost";
    sum += c;
  }
  if (!approx_equal(sum, plan.total_cost, kTolerance * std::max(1.0, std::fabs(sum)))) {
    return "total cost differs from the sum of leg costs";
  }
  for (std::size_t k = 1; k < plan.waypoints.size(); ++k) {
    if (!(plan.waypoints[k].arrival > plan.waypoints[k - 1].arrival)) return "arrival times not increasing";
  }
  std::array<double, 2> pick{}, drop{};
  for (int party = 0; party < 2; ++party) {
    const TripRequest& t = party == 0 ? a : b;
    const auto& p = plan.waypoints[plan.position_of(party, true)];
    const auto& d = plan.waypoints[plan.position_of(party, false)];
    if (p.location != t.source || d.location != t.destination) return "location constraint violated";
    if (!(t.earliest_departure <= p.arrival + kTolerance && p.arrival < d.arrival &&
          d.arrival <= t.latest_arrival + kTolerance)) {
      return "temporal constraint violated";
    }
    pick[party] = p.arrival;
    drop[party] = d.arrival;
  }
  const int x = plan.first_party;
  const int y = plan.second_party();
  if (plan.kind == RideKind::kHitchhiking) {
    if (!(pick[y] < pick[x] && pick[x] < drop[x] && drop[x] < drop[y])) return "not a hitchhiking order";
  } else if (plan.kind == RideKind::kCombined) {
    if (!(pick[x] < pick[y] && pick[y] < drop[x] && drop[x] < drop[y])) return "not a combined order";
  } else {
    return "standalone plan given where a pair plan was expected";
  }
  return {};
}

struct PairEdge {
  Index i = 0;  // i < j; party 0 of `plan` is commuter i
  Index j = 0;
  double cost = 0.0;
  SharedRidePlan plan;
  std::optional<double> pickup_separation_km;
};

struct TripRejection {
  std::string commuter_id;
  std::string reason;
};

class MatchingGraphBuilder;

/// Commuters (sorted by id), their standalone rides, and the feasible pair
/// rides between them.
class MatchingGraph {
 public:
  std::size_t size() const { return commuters_.size(); }
  const std::vector<TripRequest>& commuters() const { return commuters_; }
  const TripRequest& commuter(Index i) const { return commuters_[i]; }
  const std::string& id(Index i) const { return commuters_[i].commuter_id; }
  double self_cost(Index i) const { return standalone_[i].total_cost; }
  const SharedRidePlan& standalone(Index i) const { return standalone_[i]; }
  const std::vector<PairEdge>& edges() const { return edges_; }
  const PairEdge& edge(Index e) const { return edges_[e]; }
  /// Edge indices incident to `i`, ordered by partner index.
  const std::vector<Index>& incident(Index i) const { return incident_[i]; }
  const std::vector<TripRejection>& rejections() const { return rejections_; }

  Index partner(Index e, Index i) const { return edges_[e].i == i ? edges_[e].j : edges_[e].i; }

  std::optional<Index> edge_between(Index a, Index b) const {
    if (a > b) std::swap(a, b);
    const auto& inc = incident_[a];
    auto it = std::lower_bound(inc.begin(), inc.end(), b,
                               [&](Index e, Index value) { return partner(e, a) < value; });
    if (it != inc.end() && partner(*it, a) == b) return *it;
    return std::nullopt;
  }

  std::optional<Index> find(std::string_view commuter_id) const {
    auto it = std::lower_bound(commuters_.begin(), commuters_.end(), commuter_id,
                               [](const TripRequest& t, std::string_view v) { return t.commuter_id < v; });
    if (it != commuters_.end() && it->commuter_id == commuter_id) return static_cast<Index>(it - commuters_.begin());
    return std::nullopt;
  }

  using Builder = MatchingGraphBuilder;

 private:
  friend class MatchingGraphBuilder;

  std::vector<TripRequest> commuters_;
  std::vector<SharedRidePlan> standalone_;
  std::vector<PairEdge> edges_;
  std::vector<std::vector<Index>> incident_;
  std::vector<TripRejection> rejections_;
};

/// Assembles a graph from precomputed costs; used by fixtures and tests
/// that work at the cost level rather than from a travel model.
class MatchingGraphBuilder {
 public:
  Index add_commuter(TripRequest trip, SharedRidePlan standalone) {
    graph_.commuters_.push_back(std::move(trip));
    graph_.standalone_.push_back(std::move(standalone));
    return graph_.commuters_.size() - 1;
  }
  void add_edge(PairEdge edge) { graph_.edges_.push_back(std::move(edge)); }
  void reject(TripRejection r) { graph_.rejections_.push_back(std::move(r)); }
  /// Requires commuters to have been added in ascending id order.
  MatchingGraph finish() &&;

 private:
  MatchingGraph graph_;
};

inline MatchingGraph MatchingGraphBuilder::finish() && {
  auto& g = graph_;
  for (std::size_t k = 1; k < g.commuters_.size(); ++k) {
    if (!(g.commuters_[k - 1].commuter_id < g.commuters_[k].commuter_id)) {
      throw InputError("commuter ids must be unique and added in ascending order");
    }
  }
  for (std::size_t k = 0; k < g.standalone_.size(); ++k) {
    const double c = g.standalone_[k].total_cost;
    if (!(c > 0.0) || c > kMaxCostMagnitude) {
      throw InputError("standalone cost of '" + g.commuters_[k].commuter_id + "' must be in (0, 1e12]");
    }
  }
  for (auto& e : g.edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i == e.j || e.j >= g.commuters_.size()) throw InputError("pair edge has invalid endpoints");
    if (!std::isfinite(e.cost) || e.cost > kMaxCostMagnitude) throw InputError("pair edge cost out of range");
    ensure(e.cost >= std::max(g.standalone_[e.i].total_cost, g.standalone_[e.j].total_cost) - kTolerance,
           "pair ride between '" + g.commuters_[e.i].commuter_id + "' and '" + g.commuters_[e.j].commuter_id +
               "' is cheaper than a standalone ride");
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const PairEdge& x, const PairEdge& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
  for (std::size_t k = 1; k < g.edges_.size(); ++k) {
    if (g.edges_[k].i == g.edges_[k - 1].i && g.edges_[k].j == g.edges_[k - 1].j) {
      throw InputError("duplicate pair edge");
    }
  }
  g.incident_.assign(g.commuters_.size(), {});
  for (Index e = 0; e < g.edges_.size(); ++e) {
    g.incident_[g.edges_[e].i].push_back(e);
    g.incident_[g.edges_[e].j].push_back(e);
  }
  for (Index i = 0; i < g.incident_.size(); ++i) {
    std::sort(g.incident_[i].begin(), g.incident_[i].end(),
              [&](Index x, Index y) { return g.partner(x, i) < g.partner(y, i); });
  }
  return std::move(g);
}

/// Builds the matching graph: standalone rides for every routable trip, and a
/// pair edge for each pair departing within `pairing_window_s` of each other
/// that admits a sharable ride. Unroutable trips are dropped with a diagnostic.
template <TravelModel Model>
MatchingGraph build_matching_graph(const Model& model, std::vector<TripRequest> trips,
                                   double pairing_window_s = std::numeric_limits<double>::infinity()) {
  if (!(pairing_window_s >= 0.0)) throw InputError("pairing window must be >= 0");
  std::sort(trips.begin(), trips.end(),
            [](const TripRequest& x, const TripRequest& y) { return x.commuter_id < y.commuter_id; });
  for (std::size_t k = 1; k < trips.size(); ++k) {
    if (trips[k].commuter_id == trips[k - 1].commuter_id) {
      throw InputError("duplicate commuter id '" + trips[k].commuter_id + "'");
    }
  }

  MatchingGraph::Builder builder;
  std::vector<TripRequest> kept;
  for (auto& trip : trips) {
    validate_trip(trip);
    auto solo = plan_standalone(model, trip);
    if (!solo) {
      builder.reject({trip.commuter_id, "no standalone route reaches the destination before latest_arrival"});
      continue;
    }
    if (!(solo->total_cost > 0.0)) {
      builder.reject({trip.commuter_id, "standalone ride has zero cost"});
      continue;
    }
    kept.push_back(trip);
    builder.add_commuter(std::move(trip), std::move(*solo));
  }

  // Sweep in departure order so only pairs inside the window are planned.
  std::vector<Index> by_departure(kept.size());
  for (Index k = 0; k < kept.size(); ++k) by_departure[k] = k;
  std::stable_sort(by_departure.begin(), by_departure.end(), [&](Index x, Index y) {
    return kept[x].earliest_departure < kept[y].earliest_departure;
  });
  for (std::size_t p = 0; p < by_departure.size(); ++p) {
    for (std::size_t q = p + 1; q < by_departure.size(); ++q) {
      Index i = by_departure[p];
      Index j = by_departure[q];
      if (kept[j].earliest_departure - kept[i].earliest_departure > pairing_window_s) break;
      if (i > j) std::swap(i, j);
      auto plan = min_cost_sharable_ride(model, kept[i], kept[j]);
      if (!plan) continue;
      PairEdge edge{i, j, plan->total_cost, std::move(*plan), std::nullopt};
      if constexpr (GeoTravelModel<Model>) {
        edge.pickup_separation_km = model.separation_km(kept[i].source, kept[j].source);
      }
      builder.add_edge(std::move(edge));
    }
  }
  return std::move(builder).finish();
}

}  // namespace rideshare

#endif  // RIDESHARE_RIDE_PLANNER_HPP_
