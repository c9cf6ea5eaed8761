#ifndef RIDESHARE_METRICS_HPP_
#define RIDESHARE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/cost_sharing.hpp"
#include "rideshare/ride_planner.hpp"
#include "rideshare/stable_matcher.hpp"

namespace rideshare {

struct MechanismReport {
  Mechanism mechanism = Mechanism::kEqual;
  double social_cost = 0.0;
  double optimal_cost = 0.0;
  double optimality_ratio = 1.0;
  double social_utility = 0.0;
  double matched_fraction = 0.0;  // 2 |pairs| / |commuters|
  std::size_t commuters = 0;
  std::size_t matched_commuters = 0;
  std::size_t unmatched_commuters = 0;
  std::size_t matched_pairs = 0;
  // Distributions, matched commuters / pairs only, in ascending pair order.
  std::vector<double> normalized_utilities;
  std::vector<double> standalone_cost_ratios;
  std::vector<double> delay_ratios;
  std::vector<double> separation_distances_km;
};

namespace detail {

inline void require_same_commuters(const Assignment& a, const Assignment& b) {
  const auto members = [](const Assignment& x) {
    std::vector<Index> m(x.singletons);
    for (auto [i, j] : x.pairs) {
      m.push_back(i);
      m.push_back(j);
    }
    std::sort(m.begin(), m.end());
    return m;
  };
  if (members(a) != members(b)) throw InputError("assignments cover different commuter sets");
}

}  // namespace detail

inline double optimality_ratio(const Assignment& stable, const Assignment& optimum) {
  detail::require_same_commuters(stable, optimum);
  if (!(optimum.social_cost > 0.0)) throw InputError("optimal social cost must be > 0");
  return stable.social_cost / optimum.social_cost;
}

/// Social cost, utility and per-commuter distributions of `a` under `mech`.
/// Optimum-related fields are left for the caller (see evaluate_mechanism).
inline MechanismReport commuter_distributions(const Assignment& a, Mechanism mech, const MatchingGraph& g) {
  (void)partners_of(g, a);
  MechanismReport r;
  r.mechanism = mech;
  r.commuters = g.size();
  r.matched_pairs = a.pairs.size();
  r.matched_commuters = 2 * a.pairs.size();
  r.unmatched_commuters = a.singletons.size();
  r.matched_fraction = g.size() == 0 ? 0.0 : static_cast<double>(r.matched_commuters) / g.size();
  r.social_cost = social_cost(g, a);
  r.optimal_cost = r.social_cost;

  for (auto [i, j] : a.pairs) {
    const Index e = *g.edge_between(i, j);
    const auto& edge = g.edge(e);
    const auto pay = payments(mech, edge.plan, g.self_cost(edge.i), g.self_cost(edge.j));
    double delay = 0.0;
    for (int party = 0; party < 2; ++party) {
      const Index who = party == 0 ? edge.i : edge.j;
      const double c = g.self_cost(who);
      r.social_utility += pay.utility[party];
      r.normalized_utilities.push_back(pay.utility[party] / c);
      const double own = g.standalone(who).rider_distance_km[0];
      const double shared = edge.plan.rider_distance_km[party];
      delay = std::max(delay, own > 0.0 ? shared / own : 1.0);
    }
    const double ci = g.self_cost(edge.i);
    const double cj = g.self_cost(edge.j);
    r.standalone_cost_ratios.push_back(std::min(ci, cj) / std::max(ci, cj));
    r.delay_ratios.push_back(delay);
    if (edge.pickup_separation_km) r.separation_distances_km.push_back(*edge.pickup_separation_km);
  }
  return r;
}

/// Full report for a stable assignment measured against `optimum`.
inline MechanismReport evaluate_mechanism(const Assignment& stable, const Assignment& optimum, Mechanism mech,
                                          const MatchingGraph& g) {
  auto r = commuter_distributions(stable, mech, g);
  r.optimal_cost = social_cost(g, optimum);
  detail::require_same_commuters(stable, optimum);
  r.optimality_ratio = r.optimal_cost > 0.0 ? r.social_cost / r.optimal_cost : 1.0;
  return r;
}

}  // namespace rideshare

#endif  // RIDESHARE_METRICS_HPP_
