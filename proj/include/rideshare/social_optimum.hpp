#ifndef RIDESHARE_SOCIAL_OPTIMUM_HPP_
#define RIDESHARE_SOCIAL_OPTIMUM_HPP_

#include <cmath>
#include <numeric>
#include <vector>

#include "rideshare/blossom.hpp"
#include "rideshare/core.hpp"
#include "rideshare/ride_planner.hpp"
#include "rideshare/stable_matcher.hpp"

namespace rideshare {

struct SavingsEdge {
  Index i = 0;
  Index j = 0;
  double savings = 0.0;  // c_ii + c_jj - c_ij
  Index edge = 0;        // index into the matching graph
};

/// Savings view of a matching graph; one entry per pair edge, in edge order.
struct SavingsGraph {
  std::size_t nodes = 0;
  std::vector<SavingsEdge> weighted_edges;
};

inline SavingsGraph savings_graph(const MatchingGraph& g) {
  SavingsGraph s;
  s.nodes = g.size();
  s.weighted_edges.reserve(g.edges().size());
  for (Index e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edge(e);
    s.weighted_edges.push_back({edge.i, edge.j, g.self_cost(edge.i) + g.self_cost(edge.j) - edge.cost, e});
  }
  return s;
}

/// Σ c_ii − Σ savings over the assignment's pairs.
inline double cost_via_savings(const MatchingGraph& g, const Assignment& a) {
  double total = 0.0;
  for (Index i = 0; i < g.size(); ++i) total += g.self_cost(i);
  for (auto [i, j] : a.pairs) {
    const auto& edge = g.edge(*g.edge_between(i, j));
    total -= g.self_cost(i) + g.self_cost(j) - edge.cost;
  }
  return total;
}

/// Fixed-point scale for savings inside the matching solver (2^-40 ≈ 1e-12).
inline constexpr int kSavingsFractionBits = 40;

namespace detail {

inline Index find_root(std::vector<Index>& parent, Index x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace detail

/// Minimum social-cost assignment. Pairs with positive savings feed a
/// maximum-weight matching, solved per connected component; everyone left
/// unmatched rides alone.
inline Assignment social_optimum(const MatchingGraph& g) {
  const auto sg = savings_graph(g);
  std::vector<const SavingsEdge*> useful;
  for (const auto& e : sg.weighted_edges) {
    if (e.savings > kTolerance) useful.push_back(&e);
  }

  std::vector<Index> parent(g.size());
  std::iota(parent.begin(), parent.end(), Index{0});
  for (const auto* e : useful) {
    const Index a = detail::find_root(parent, e->i);
    const Index b = detail::find_root(parent, e->j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<Index> component(g.size());
  std::vector<Index> local(g.size());
  std::vector<std::vector<Index>> members;
  std::vector<Index> component_of_root(g.size(), kNoIndex);
  for (Index v = 0; v < g.size(); ++v) {
    const Index root = detail::find_root(parent, v);
    if (component_of_root[root] == kNoIndex) {
      component_of_root[root] = members.size();
      members.emplace_back();
    }
    component[v] = component_of_root[root];
    local[v] = members[component[v]].size();
    members[component[v]].push_back(v);
  }
  std::vector<std::vector<blossom::WeightedEdge>> component_edges(members.size());
  for (const auto* e : useful) {
    const auto w = static_cast<blossom::Weight>(std::nearbyint(std::ldexp(e->savings, kSavingsFractionBits)));
    component_edges[component[e->i]].push_back({local[e->i], local[e->j], w});
  }

  std::vector<Index> partner(g.size(), kNoIndex);
  for (Index c = 0; c < members.size(); ++c) {
    if (component_edges[c].empty()) continue;
    const auto mate = blossom::max_weight_matching(members[c].size(), component_edges[c]);
    for (Index v = 0; v < mate.size(); ++v) {
      if (mate[v] != kNoIndex) partner[members[c][v]] = members[c][mate[v]];
    }
  }
  auto result = assignment_from_partners(g, partner);
  ensure(approx_equal(result.social_cost, cost_via_savings(g, result),
                      kTolerance * std::max(1.0, std::fabs(result.social_cost))),
         "social optimum violates the savings identity");
  return result;
}

inline constexpr std::size_t kBruteForceLimit = 12;

/// Exhaustive search over every feasible assignment. Among equal-cost
/// optima, returns the lexicographically smallest sorted pair list.
inline Assignment brute_force_optimum(const MatchingGraph& g) {
  if (g.size() > kBruteForceLimit) {
    throw InputError("brute-force optimum supports at most " + std::to_string(kBruteForceLimit) + " commuters");
  }
  const std::size_t n = g.size();
  std::vector<char> used(n, 0);
  std::vector<std::pair<Index, Index>> pairs;
  Assignment best;
  bool have_best = false;

  auto consider = [&](double cost) {
    if (have_best) {
      if (cost > best.social_cost + kTolerance) return;
      if (cost >= best.social_cost - kTolerance && !(pairs < best.pairs)) return;
    }
    best.pairs = pairs;
    best.social_cost = cost;
    have_best = true;
  };

  auto search = [&](auto&& self, Index from, double cost) -> void {
    while (from < n && used[from]) ++from;
    if (from == n) {
      consider(cost);
      return;
    }
    used[from] = 1;
    self(self, from + 1, cost + g.self_cost(from));
    for (Index e : g.incident(from)) {
      const Index other = g.partner(e, from);
      if (used[other]) continue;
      used[other] = 1;
      pairs.emplace_back(std::min(from, other), std::max(from, other));
      self(self, from + 1, cost + g.edge(e).cost);
      pairs.pop_back();
      used[other] = 0;
    }
    used[from] = 0;
  };
  search(search, 0, 0.0);

  std::sort(best.pairs.begin(), best.pairs.end());
  std::vector<char> paired(n, 0);
  for (auto [i, j] : best.pairs) paired[i] = paired[j] = 1;
  for (Index i = 0; i < n; ++i) {
    if (!paired[i]) best.singletons.push_back(i);
  }
  return best;
}

}  // namespace rideshare

#endif  // RIDESHARE_SOCIAL_OPTIMUM_HPP_
