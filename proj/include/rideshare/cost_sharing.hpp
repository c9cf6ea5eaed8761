#ifndef RIDESHARE_COST_SHARING_HPP_
#define RIDESHARE_COST_SHARING_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/ride_planner.hpp"

namespace rideshare {

enum class Mechanism { kEqual, kEgalitarian, kProportional, kSegmentBased };

inline constexpr std::array<Mechanism, 4> kAllMechanisms{Mechanism::kEqual, Mechanism::kEgalitarian,
                                                         Mechanism::kProportional, Mechanism::kSegmentBased};

inline std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kEqual: return "eq";
    case Mechanism::kEgalitarian: return "ega";
    case Mechanism::kProportional: return "pp";
    case Mechanism::kSegmentBased: return "sb";
  }
  return "?";
}

inline Mechanism parse_mechanism(std::string_view name) {
  for (Mechanism m : kAllMechanisms) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown mechanism '" + std::string(name) + "' (expected eq, ega, pp or sb)");
}

/// Payments and utilities of both parties of a pair ride, indexed by party.
struct PaymentProfile {
  std::array<double, 2> payment{0.0, 0.0};
  std::array<double, 2> utility{0.0, 0.0};
};

/// Splits `plan.total_cost` between party 0 (standalone cost `self_0`) and
/// party 1 (standalone cost `self_1`). All four rules are budget balanced.
inline PaymentProfile payments(Mechanism mech, const SharedRidePlan& plan, double self_0, double self_1) {
  const double c = plan.total_cost;
  PaymentProfile out;
  switch (mech) {
    case Mechanism::kEqual:
      out.payment = {c / 2, c / 2};
      break;
    case Mechanism::kEgalitarian:
      out.payment[0] = (c + self_0 - self_1) / 2;
      out.payment[1] = (c + self_1 - self_0) / 2;
      break;
    case Mechanism::kProportional:
      out.payment[0] = self_0 * c / (self_0 + self_1);
      out.payment[1] = self_1 * c / (self_0 + self_1);
      break;
    case Mechanism::kSegmentBased: {
      if (plan.kind == RideKind::kStandalone || plan.segment_costs.size() != 3) {
        throw InvariantError("segment-based sharing needs a pair plan with three leg costs");
      }
      const auto& leg = plan.segment_costs;
      const int x = plan.first_party;
      const int y = plan.second_party();
      if (plan.kind == RideKind::kHitchhiking) {
        // s_y -> s_x -> d_x -> d_y: x rides only the shared middle leg.
        out.payment[x] = leg[1] / 2;
        out.payment[y] = leg[0] + leg[1] / 2 + leg[2];
      } else {
        // s_x -> s_y -> d_x -> d_y: the middle leg is shared.
        out.payment[x] = leg[0] + leg[1] / 2;
        out.payment[y] = leg[1] / 2 + leg[2];
      }
      break;
    }
  }
  out.utility = {self_0 - out.payment[0], self_1 - out.payment[1]};
  return out;
}

/// Payments for every edge of `g`, in edge order. Party 0 is the lower index.
inline std::vector<PaymentProfile> edge_payments(Mechanism mech, const MatchingGraph& g) {
  std::vector<PaymentProfile> out;
  out.reserve(g.edges().size());
  for (const auto& e : g.edges()) out.push_back(payments(mech, e.plan, g.self_cost(e.i), g.self_cost(e.j)));
  return out;
}

/// Payment of commuter `who` on edge `e` (who must be an endpoint).
inline double payment_of(const MatchingGraph& g, const std::vector<PaymentProfile>& pay, Index e, Index who) {
  return pay[e].payment[g.edge(e).i == who ? 0 : 1];
}

struct RankedOption {
  Index partner = 0;
  Index edge = 0;
  double payment = 0.0;
};

/// A commuter's ranking of ride-sharing options. `ranked_options` holds the
/// options strictly better than riding alone, best first; standalone follows
/// implicitly, and `tied_with_standalone` lists options that would cost
/// exactly the standalone fare (kept, but never proposed).
struct PreferenceOrder {
  Index owner = 0;
  std::vector<RankedOption> ranked_options;
  std::vector<RankedOption> tied_with_standalone;

  /// Rank of `partner` among acceptable options, or nullopt.
  std::optional<std::size_t> rank_of(Index partner) const {
    for (std::size_t r = 0; r < ranked_options.size(); ++r) {
      if (ranked_options[r].partner == partner) return r;
    }
    return std::nullopt;
  }
};

using Preferences = std::vector<PreferenceOrder>;

inline Preferences build_preferences(Mechanism mech, const MatchingGraph& g) {
  const auto pay = edge_payments(mech, g);
  Preferences prefs(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    auto& order = prefs[i];
    order.owner = i;
    const double standalone = g.self_cost(i);
    for (Index e : g.incident(i)) {
      RankedOption opt{g.partner(e, i), e, payment_of(g, pay, e, i)};
      if (opt.payment < standalone - kTolerance) {
        order.ranked_options.push_back(opt);
      } else if (opt.payment <= standalone + kTolerance) {
        order.tied_with_standalone.push_back(opt);
      }
    }
    // Commuter indices follow ascending commuter id, so index order is the
    // global tie-break.
    const auto by_payment = [](const RankedOption& a, const RankedOption& b) {
      if (a.payment != b.payment) return a.payment < b.payment;
      return a.partner < b.partner;
    };
    std::sort(order.ranked_options.begin(), order.ranked_options.end(), by_payment);
    std::sort(order.tied_with_standalone.begin(), order.tied_with_standalone.end(), by_payment);
  }
  return prefs;
}

struct NegativeUtility {
  Index edge = 0;
  Index commuter = 0;
  double utility = 0.0;
};

/// Every (edge, endpoint) for which `mech` charges more than riding alone.
inline std::vector<NegativeUtility> negative_utility_flags(Mechanism mech, const MatchingGraph& g) {
  const auto pay = edge_payments(mech, g);
  std::vector<NegativeUtility> flags;
  for (Index e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edge(e);
    for (int party = 0; party < 2; ++party) {
      if (pay[e].utility[party] < -kTolerance) {
        flags.push_back({e, party == 0 ? edge.i : edge.j, pay[e].utility[party]});
      }
    }
  }
  return flags;
}

}  // namespace rideshare

#endif  // RIDESHARE_COST_SHARING_HPP_
