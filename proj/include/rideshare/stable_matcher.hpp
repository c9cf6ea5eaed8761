#ifndef RIDESHARE_STABLE_MATCHER_HPP_
#define RIDESHARE_STABLE_MATCHER_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/cost_sharing.hpp"
#include "rideshare/ride_planner.hpp"

namespace rideshare {

/// A feasible ride-sharing assignment: disjoint pairs plus singletons that
/// together cover every commuter exactly once.
struct Assignment {
  std::vector<std::pair<Index, Index>> pairs;  // (i, j) with i < j, sorted
  std::vector<Index> singletons;               // sorted
  double social_cost = 0.0;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.pairs == b.pairs && a.singletons == b.singletons;
  }
};

/// Builds an assignment from a partner table (kNoIndex = standalone) and
/// checks it against the graph.
inline Assignment assignment_from_partners(const MatchingGraph& g, const std::vector<Index>& partner) {
  if (partner.size() != g.size()) throw InputError("partner table does not cover the commuter set");
  Assignment a;
  for (Index i = 0; i < g.size(); ++i) {
    const Index p = partner[i];
    if (p == kNoIndex || p == i) {
      a.singletons.push_back(i);
      a.social_cost += g.self_cost(i);
      continue;
    }
    if (p >= g.size() || partner[p] != i) throw InputError("partner table is not symmetric");
    if (i < p) {
      const auto e = g.edge_between(i, p);
      if (!e) throw InputError("assignment pairs '" + g.id(i) + "' and '" + g.id(p) + "' without a sharable ride");
      a.pairs.emplace_back(i, p);
      a.social_cost += g.edge(*e).cost;
    }
  }
  return a;
}

/// Partner table of an assignment, validating that it partitions the commuters.
inline std::vector<Index> partners_of(const MatchingGraph& g, const Assignment& a) {
  std::vector<Index> partner(g.size(), kNoIndex);
  std::vector<char> covered(g.size(), 0);
  const auto cover = [&](Index i) {
    if (i >= g.size()) throw InputError("assignment refers to an unknown commuter");
    if (covered[i]) throw InputError("commuter '" + g.id(i) + "' is covered twice");
    covered[i] = 1;
  };
  for (auto [i, j] : a.pairs) {
    cover(i);
    cover(j);
    if (!g.edge_between(i, j)) throw InputError("assignment uses a pair without a sharable ride");
    partner[i] = j;
    partner[j] = i;
  }
  for (Index s : a.singletons) cover(s);
  for (Index i = 0; i < g.size(); ++i) {
    if (!covered[i]) throw InputError("commuter '" + g.id(i) + "' is not covered");
  }
  return partner;
}

/// Recomputes the social cost from the graph; throws if `a` is infeasible.
inline double social_cost(const MatchingGraph& g, const Assignment& a) {
  (void)partners_of(g, a);
  double cost = 0.0;
  for (auto [i, j] : a.pairs) cost += g.edge(*g.edge_between(i, j)).cost;
  for (Index s : a.singletons) cost += g.self_cost(s);
  return cost;
}

enum class ProposalOutcome : std::uint8_t { kAccepted, kRejected, kDisplaced };

struct ProposalEvent {
  Index proposer = 0;
  Index proposee = 0;
  ProposalOutcome outcome = ProposalOutcome::kRejected;
  Index displaced = kNoIndex;  // proposee's previous partner when outcome is kDisplaced
};

/// Events past kMaxTraceEvents are counted but not stored; only an untruncated
/// trace replays to the final assignment.
inline constexpr std::size_t kMaxTraceEvents = std::size_t{1} << 20;

struct MatchTrace {
  std::vector<ProposalEvent> rounds;
  bool truncated = false;

  void record(const ProposalEvent& ev) {
    if (rounds.size() < kMaxTraceEvents) {
      rounds.push_back(ev);
    } else {
      truncated = true;
    }
  }
};

/// Re-applies a trace from the all-standalone state and returns the partner
/// table it leads to.
inline std::vector<Index> replay(const MatchTrace& trace, std::size_t commuters) {
  if (trace.truncated) throw InputError("a truncated trace cannot be replayed");
  std::vector<Index> partner(commuters, kNoIndex);
  for (const auto& ev : trace.rounds) {
    if (ev.outcome == ProposalOutcome::kRejected) continue;
    if (ev.outcome == ProposalOutcome::kDisplaced) {
      if (partner[ev.proposee] != ev.displaced) throw InvariantError("trace displaces a non-partner");
      partner[ev.displaced] = kNoIndex;
    } else if (partner[ev.proposee] != kNoIndex) {
      throw InvariantError("trace accepts into an occupied commuter");
    }
    if (partner[ev.proposer] != kNoIndex) partner[partner[ev.proposer]] = kNoIndex;
    partner[ev.proposer] = ev.proposee;
    partner[ev.proposee] = ev.proposer;
  }
  return partner;
}

struct StableMatch {
  Assignment assignment;
  MatchTrace trace;
  std::size_t proposals = 0;
};

struct CyclicFailure {
  std::vector<std::vector<Index>> cycles;
  MatchTrace trace;
  std::size_t proposals = 0;
};

using MatchOutcome = std::variant<StableMatch, CyclicFailure>;

namespace detail {

/// rank lookup over acceptable options; sorted by partner for binary search.
class RankTable {
 public:
  explicit RankTable(const Preferences& prefs) : by_partner_(prefs.size()) {
    for (const auto& order : prefs) {
      auto& row = by_partner_.at(order.owner);
      for (std::size_t r = 0; r < order.ranked_options.size(); ++r) {
        row.emplace_back(order.ranked_options[r].partner, r);
      }
      std::sort(row.begin(), row.end());
    }
  }

  std::optional<std::size_t> rank(Index owner, Index partner) const {
    const auto& row = by_partner_[owner];
    auto it = std::lower_bound(row.begin(), row.end(), std::pair<Index, std::size_t>{partner, 0});
    if (it == row.end() || it->first != partner) return std::nullopt;
    return it->second;
  }

  bool mutual(Index a, Index b) const { return rank(a, b) && rank(b, a); }

 private:
  std::vector<std::vector<std::pair<Index, std::size_t>>> by_partner_;
};

inline void check_preferences(const Preferences& prefs) {
  for (Index i = 0; i < prefs.size(); ++i) {
    if (prefs[i].owner != i) throw InputError("preference orders must be indexed by owner");
    for (const auto& opt : prefs[i].ranked_options) {
      if (opt.partner >= prefs.size() || opt.partner == i) throw InputError("preference lists an invalid partner");
    }
  }
}

}  // namespace detail

struct CycleSearchLimits {
  std::size_t max_cycles = 1000;
  std::size_t max_steps = 5'000'000;
};

/// True if `cycle` = (i1, ..., is), s >= 3, is a cyclic preference: every
/// member prefers its predecessor over its successor, and all consecutive
/// pairs are mutually acceptable.
inline bool is_cyclic_preference(const Preferences& prefs, const std::vector<Index>& cycle) {
  const std::size_t s = cycle.size();
  if (s < 3) return false;
  detail::RankTable ranks(prefs);
  for (std::size_t k = 0; k < s; ++k) {
    const Index prev = cycle[(k + s - 1) % s];
    const Index cur = cycle[k];
    const Index next = cycle[(k + 1) % s];
    if (!ranks.mutual(cur, next)) return false;
    const auto rp = ranks.rank(cur, prev);
    const auto rn = ranks.rank(cur, next);
    if (!rp || !rn || !(*rp < *rn)) return false;
  }
  std::vector<Index> sorted(cycle);
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

namespace detail {

/// Shortens a closed walk (each member prefers its predecessor over its
/// successor) to an elementary cycle. At a repeated commuter v, seen as
/// a -> v -> b and later c -> v -> d, v ranks a above b and c above d, so
/// either c is above b or a is above d: one of the two sub-walks keeps the
/// property.
inline std::vector<Index> elementary_cycle(const RankTable& ranks, std::vector<Index> walk) {
  const auto above = [&](Index who, Index x, Index y) { return *ranks.rank(who, x) < *ranks.rank(who, y); };
  for (;;) {
    const std::size_t s = walk.size();
    std::size_t p = s, q = s;
    std::unordered_map<Index, std::size_t> first_seen;
    for (std::size_t y = 0; y < s; ++y) {
      const auto [it, fresh] = first_seen.emplace(walk[y], y);
      if (!fresh) {
        p = it->second;
        q = y;
        break;
      }
    }
    if (p == s) break;
    const Index v = walk[p];
    const Index b = walk[p + 1];
    const Index c = walk[q - 1];
    std::vector<Index> next;
    if (q - p >= 3 && above(v, c, b)) {
      next.assign(walk.begin() + static_cast<std::ptrdiff_t>(p), walk.begin() + static_cast<std::ptrdiff_t>(q));
    } else {
      next.assign(walk.begin() + static_cast<std::ptrdiff_t>(q), walk.end());
      next.insert(next.end(), walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(p));
    }
    walk = std::move(next);
  }
  std::rotate(walk.begin(), std::min_element(walk.begin(), walk.end()), walk.end());
  return walk;
}

}  // namespace detail

/// Finds elementary cyclic preferences among mutually acceptable pairs.
/// Each cycle is reported once, rotated to start at its smallest member.
/// An acyclic input is certified in polynomial time; enumeration of cycles
/// stops at `limits`.
inline std::vector<std::vector<Index>> detect_cycles(const Preferences& prefs, CycleSearchLimits limits = {}) {
  detail::check_preferences(prefs);
  const std::size_t n = prefs.size();
  detail::RankTable ranks(prefs);

  // Arcs (u -> v) = "v was reached from u"; one per mutually acceptable
  // ordered pair. Successors of (u -> v) are (v -> w) for every w that v
  // ranks below u. For each v, `mutual[v]` lists acceptable partners best first.
  std::vector<std::vector<Index>> mutual(n);
  for (Index v = 0; v < n; ++v) {
    for (const auto& opt : prefs[v].ranked_options) {
      if (ranks.rank(opt.partner, v)) mutual[v].push_back(opt.partner);
    }
  }
  std::vector<std::size_t> base(n + 1, 0);
  for (Index v = 0; v < n; ++v) base[v + 1] = base[v] + mutual[v].size();
  const std::size_t arcs = base[n];
  const auto position = [&](Index v, Index u) -> std::size_t {
    const auto& m = mutual[v];
    return static_cast<std::size_t>(std::find(m.begin(), m.end(), u) - m.begin());
  };
  // Arc a = base[v] + p means (mutual[v][p] -> v). Its successors are the arcs
  // (v -> w) for w = mutual[v][q], q > p, i.e. arc base[w] + position(w, v).
  std::vector<std::vector<std::size_t>> entering_position(n);
  for (Index v = 0; v < n; ++v) {
    entering_position[v].resize(mutual[v].size());
    for (std::size_t q = 0; q < mutual[v].size(); ++q) {
      const Index w = mutual[v][q];
      entering_position[v][q] = base[w] + position(w, v);
    }
  }
  const auto arc_head = [&](std::size_t a) {
    return static_cast<Index>(std::upper_bound(base.begin(), base.end(), a) - base.begin() - 1);
  };

  // Kahn elimination: an arc on no cycle eventually reaches in-degree zero.
  // In-degree of arc (v -> w) = number of u ranked above w by v.
  std::vector<std::size_t> indegree(arcs, 0);
  for (Index v = 0; v < n; ++v) {
    for (std::size_t q = 0; q < mutual[v].size(); ++q) indegree[entering_position[v][q]] = q;
  }
  std::vector<std::size_t> stack;
  for (std::size_t a = 0; a < arcs; ++a) {
    if (indegree[a] == 0) stack.push_back(a);
  }
  std::vector<char> removed(arcs, 0);
  std::size_t remaining = arcs;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    removed[a] = 1;
    --remaining;
    const Index v = arc_head(a);
    const std::size_t p = a - base[v];
    for (std::size_t q = p + 1; q < mutual[v].size(); ++q) {
      const std::size_t succ = entering_position[v][q];
      if (--indegree[succ] == 0) stack.push_back(succ);
    }
  }
  std::set<std::vector<Index>> found;
  if (remaining == 0) return {};

  // Every back edge of a depth-first search over the surviving arcs closes a
  // walk; shortening it guarantees at least one witness. A few witnesses
  // suffice here, the enumeration below supplies the rest.
  {
    constexpr std::size_t kWitnessWalks = 64;
    std::size_t walks = 0;
    std::vector<char> colour(arcs, 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t root = 0; root < arcs && walks < kWitnessWalks; ++root) {
      if (removed[root] || colour[root]) continue;
      colour[root] = 1;
      frames.assign({{root, 0}});
      while (!frames.empty() && walks < kWitnessWalks) {
        auto& [arc, next_q] = frames.back();
        const Index v = arc_head(arc);
        const std::size_t p = arc - base[v];
        if (next_q <= p) next_q = p + 1;
        if (next_q >= mutual[v].size()) {
          colour[arc] = 2;
          frames.pop_back();
          continue;
        }
        const std::size_t succ = entering_position[v][next_q++];
        if (removed[succ] || colour[succ] == 2) continue;
        if (colour[succ] == 0) {
          colour[succ] = 1;
          frames.emplace_back(succ, 0);
          continue;
        }
        ++walks;
        std::vector<Index> walk;
        std::size_t k = frames.size();
        while (frames[k - 1].first != succ) --k;
        for (; k <= frames.size(); ++k) walk.push_back(arc_head(frames[k - 1].first));
        auto cycle = detail::elementary_cycle(ranks, std::move(walk));
        ensure(is_cyclic_preference(prefs, cycle), "cycle reduction produced a non-cyclic sequence");
        found.insert(std::move(cycle));
      }
    }
  }

  // Depth-first enumeration over surviving arcs, starting at the smallest member.
  std::vector<std::vector<Index>> cycles;
  std::size_t steps = 0;
  std::vector<char> on_path(n, 0);
  std::vector<Index> path;
  for (Index start = 0; start < n && cycles.size() < limits.max_cycles && steps < limits.max_steps; ++start) {
    for (std::size_t q0 = 0; q0 < mutual[start].size(); ++q0) {
      const Index second = mutual[start][q0];
      if (second < start) continue;
      const std::size_t first_arc = entering_position[start][q0];  // (start -> second)
      if (removed[first_arc]) continue;
      path.assign({start, second});
      on_path[start] = on_path[second] = 1;
      // Frame: current arc plus the next successor position to try.
      std::vector<std::pair<std::size_t, std::size_t>> frames{{first_arc, 0}};
      while (!frames.empty() && cycles.size() < limits.max_cycles && steps < limits.max_steps) {
        ++steps;
        auto& [arc, next_q] = frames.back();
        const Index v = arc_head(arc);
        const std::size_t p = arc - base[v];
        if (next_q <= p) next_q = p + 1;
        if (next_q >= mutual[v].size()) {
          on_path[v] = 0;
          path.pop_back();
          frames.pop_back();
          continue;
        }
        const std::size_t q = next_q++;
        const Index w = mutual[v][q];
        const std::size_t succ = entering_position[v][q];
        if (removed[succ] || w < start) continue;
        if (w == start) {
          // Close only if start prefers v (its predecessor) over `second`.
          if (path.size() >= 3 && position(start, v) < q0) cycles.push_back(path);
          continue;
        }
        if (on_path[w]) continue;
        on_path[w] = 1;
        path.push_back(w);
        frames.emplace_back(succ, 0);
      }
      for (Index x : path) on_path[x] = 0;
      path.clear();
    }
  }
  found.insert(cycles.begin(), cycles.end());
  cycles.assign(found.begin(), found.end());
  std::stable_sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  if (cycles.size() > limits.max_cycles) cycles.resize(limits.max_cycles);
  return cycles;
}

/// Returns a pair that blocks `partner` under the given preference lists:
/// both sides rank each other above their current option.
inline std::optional<std::pair<Index, Index>> find_blocking_pair_in(const Preferences& prefs,
                                                                    const std::vector<Index>& partner) {
  detail::RankTable ranks(prefs);
  const auto prefers = [&](Index who, Index candidate) {
    const auto rc = ranks.rank(who, candidate);
    if (!rc) return false;
    if (partner[who] == kNoIndex) return true;
    const auto cur = ranks.rank(who, partner[who]);
    return !cur || *rc < *cur;
  };
  for (Index i = 0; i < prefs.size(); ++i) {
    for (const auto& opt : prefs[i].ranked_options) {
      const Index j = opt.partner;
      if (j <= i || partner[i] == j) continue;
      if (prefers(i, j) && prefers(j, i)) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

/// Pair (i, j), i < j, with a sharable ride in which both would pay strictly
/// less than under `a`; scans pairs in ascending order.
inline std::optional<std::pair<Index, Index>> find_blocking_pair(const Assignment& a, Mechanism mech,
                                                                 const MatchingGraph& g) {
  const auto partner = partners_of(g, a);
  const auto pay = edge_payments(mech, g);
  std::vector<double> current(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    current[i] = partner[i] == kNoIndex ? g.self_cost(i) : payment_of(g, pay, *g.edge_between(i, partner[i]), i);
  }
  for (Index e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edge(e);
    if (partner[edge.i] == edge.j) continue;
    if (definitely_less(pay[e].payment[0], current[edge.i]) && definitely_less(pay[e].payment[1], current[edge.j])) {
      return std::pair{edge.i, edge.j};
    }
  }
  return std::nullopt;
}

/// Proposal budget after which a run is declared non-convergent.
inline std::size_t proposal_budget(const Preferences& prefs) {
  std::size_t longest = 0;
  for (const auto& o : prefs) longest = std::max(longest, o.ranked_options.size());
  const std::size_t n = prefs.size();
  return n * n * (1 + longest);
}

/// Decentralised proposal algorithm with standalone outside options.
///
/// Unsuspended commuters, served from a FIFO queue seeded in ascending id
/// order, propose down their lists to partners they strictly prefer over the
/// current provisional partner. A proposee keeps the better of its current
/// partner and the proposer; any commuter left without a partner is
/// re-enqueued and restarts from the top of its list. Commuters whose lists
/// are exhausted ride alone.
inline MatchOutcome stable_match(const Preferences& prefs, const MatchingGraph& g) {
  if (prefs.size() != g.size()) throw InputError("preferences do not match the graph");
  detail::check_preferences(prefs);
  const std::size_t n = g.size();
  detail::RankTable ranks(prefs);

  std::vector<Index> partner(n, kNoIndex);
  std::vector<std::size_t> next(n, 0);
  std::vector<char> queued(n, 1);
  std::deque<Index> queue;
  for (Index i = 0; i < n; ++i) queue.push_back(i);

  MatchTrace trace;
  std::size_t proposals = 0;
  const std::size_t budget = proposal_budget(prefs);

  const auto release = [&](Index who) {
    partner[who] = kNoIndex;
    next[who] = 0;
    if (!queued[who]) {
      queued[who] = 1;
      queue.push_back(who);
    }
  };

  while (!queue.empty()) {
    const Index i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    const auto& list = prefs[i].ranked_options;
    while (next[i] < list.size()) {
      if (partner[i] != kNoIndex && next[i] >= *ranks.rank(i, partner[i])) break;
      const Index j = list[next[i]++].partner;
      const auto rank_at_j = ranks.rank(j, i);
      if (!rank_at_j) continue;  // i is not acceptable to j
      if (++proposals > budget) {
        auto cycles = detect_cycles(prefs);
        if (cycles.empty()) {
          throw InvariantError("proposal budget exhausted without a cyclic preference");
        }
        return CyclicFailure{std::move(cycles), std::move(trace), proposals};
      }
      const Index held = partner[j];
      if (held != kNoIndex && *rank_at_j >= *ranks.rank(j, held)) {
        trace.record({i, j, ProposalOutcome::kRejected, kNoIndex});
        continue;
      }
      trace.record({i, j, held == kNoIndex ? ProposalOutcome::kAccepted : ProposalOutcome::kDisplaced, held});
      if (held != kNoIndex) release(held);
      if (partner[i] != kNoIndex) release(partner[i]);
      partner[i] = j;
      partner[j] = i;
      break;
    }
  }

  if (auto blocking = find_blocking_pair_in(prefs, partner)) {
    throw InvariantError("proposal loop ended with blocking pair ('" + g.id(blocking->first) + "', '" +
                         g.id(blocking->second) + "')");
  }
  return StableMatch{assignment_from_partners(g, partner), std::move(trace), proposals};
}

}  // namespace rideshare

#endif  // RIDESHARE_STABLE_MATCHER_HPP_
