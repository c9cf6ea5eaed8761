#ifndef RIDESHARE_ROAD_NETWORK_HPP_
#define RIDESHARE_ROAD_NETWORK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/text.hpp"

namespace rideshare {

enum class PathObjective { kMinCost, kMinTime };

struct Segment {
  Index from;
  Index to;
  double cost;         // currency units, >= 0
  double travel_time;  // seconds, > 0
};

struct PathResult {
  std::vector<Index> waypoints;
  double cost = 0.0;
  double travel_time = 0.0;
};

/// Directed road graph. Junction identifiers are opaque strings; parallel
/// segments are allowed, self-loops are not.
class RoadNetwork {
 public:
  Index add_junction(std::string id) {
    if (auto it = index_.find(id); it != index_.end()) return it->second;
    const Index idx = names_.size();
    index_.emplace(id, idx);
    names_.push_back(std::move(id));
    out_.emplace_back();
    in_.emplace_back();
    return idx;
  }

  void add_segment(std::string_view from, std::string_view to, double cost, double travel_time) {
    const Index u = require(from);
    const Index v = require(to);
    if (u == v) throw InputError("self-loop segment at junction '" + std::string(from) + "'");
    if (!std::isfinite(cost) || cost < 0.0) throw InputError("segment cost must be finite and >= 0");
    if (cost > kMaxCostMagnitude) throw InputError("segment cost exceeds supported magnitude");
    if (!std::isfinite(travel_time) || travel_time <= 0.0) {
      throw InputError("segment travel time must be finite and > 0");
    }
    const Index id = segments_.size();
    segments_.push_back({u, v, cost, travel_time});
    out_[u].push_back(id);
    in_[v].push_back(id);
  }

  std::optional<Index> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Index require(std::string_view id) const {
    if (auto idx = find(id)) return *idx;
    throw InputError("unknown junction '" + std::string(id) + "'");
  }

  const std::string& name(Index junction) const { return names_.at(junction); }
  std::size_t junction_count() const { return names_.size(); }
  std::span<const Segment> segments() const { return segments_; }
  const Segment& segment(Index id) const { return segments_[id]; }
  std::span<const Index> outgoing(Index junction) const { return out_[junction]; }
  std::span<const Index> incoming(Index junction) const { return in_[junction]; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
  std::vector<Segment> segments_;
  std::vector<std::vector<Index>> out_;
  std::vector<std::vector<Index>> in_;
};

namespace detail {

inline double objective_weight(const Segment& s, PathObjective objective) {
  return objective == PathObjective::kMinCost ? s.cost : s.travel_time;
}

inline double secondary_weight(const Segment& s, PathObjective objective) {
  return objective == PathObjective::kMinCost ? s.travel_time : s.cost;
}

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

/// Single-source Dijkstra over outgoing (forward) or incoming (reverse) segments.
inline std::vector<double> dijkstra(const RoadNetwork& net, Index origin, PathObjective objective, bool reverse) {
  std::vector<double> dist(net.junction_count(), kUnreached);
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[origin] = 0.0;
  heap.emplace(0.0, origin);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    const auto edges = reverse ? net.incoming(u) : net.outgoing(u);
    for (Index sid : edges) {
      const Segment& s = net.segment(sid);
      const Index v = reverse ? s.from : s.to;
      const double nd = d + objective_weight(s, objective);
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

/// Depth-first search over segments that lie on some optimal route, trying
/// successors in junction-name order. Without zero-cost cycles this is a
/// greedy walk to the lexicographically smallest optimal junction sequence.
inline PathResult extract_lexicographic_path(const RoadNetwork& net, Index from, Index to, PathObjective objective,
                                             const std::vector<double>& from_dist,
                                             const std::vector<double>& to_dist) {
  const double total = from_dist[to];
  const double scale_tol = kTolerance * std::max(1.0, std::fabs(total));
  const auto tight_successors = [&](Index at) {
    std::vector<const Segment*> out;
    for (Index sid : net.outgoing(at)) {
      const Segment& s = net.segment(sid);
      if (to_dist[s.to] == kUnreached) continue;
      const double w = objective_weight(s, objective);
      if (std::fabs(from_dist[at] + w - from_dist[s.to]) > scale_tol) continue;
      if (std::fabs(from_dist[s.to] + to_dist[s.to] - total) > scale_tol) continue;
      out.push_back(&s);
    }
    std::sort(out.begin(), out.end(), [&](const Segment* a, const Segment* b) {
      if (a->to != b->to) return net.name(a->to) < net.name(b->to);
      return secondary_weight(*a, objective) < secondary_weight(*b, objective);
    });
    return out;
  };

  std::vector<char> visited(net.junction_count(), 0);
  std::vector<const Segment*> path;
  std::vector<std::pair<std::vector<const Segment*>, std::size_t>> frames;
  visited[from] = 1;
  frames.emplace_back(tight_successors(from), 0);
  Index at = from;
  while (at != to) {
    ensure(!frames.empty(), "shortest-path reconstruction lost the optimal route");
    auto& [succ, next] = frames.back();
    if (next == succ.size()) {
      frames.pop_back();
      if (!path.empty()) {
        at = path.back()->from;
        path.pop_back();
      }
      continue;
    }
    const Segment* s = succ[next++];
    if (visited[s->to]) continue;
    visited[s->to] = 1;
    path.push_back(s);
    at = s->to;
    if (at != to) frames.emplace_back(tight_successors(at), 0);
  }

  PathResult result;
  result.waypoints.push_back(from);
  for (const Segment* s : path) {
    result.cost += s->cost;
    result.travel_time += s->travel_time;
    result.waypoints.push_back(s->to);
  }
  return result;
}

}  // namespace detail

/// Minimum-objective route between two junctions. Ties between routes of equal
/// objective resolve to the lexicographically smallest junction sequence.
inline std::optional<PathResult> shortest_path(const RoadNetwork& net, Index from, Index to,
                                               PathObjective objective = PathObjective::kMinCost) {
  if (from >= net.junction_count() || to >= net.junction_count()) {
    throw InputError("junction index out of range");
  }
  if (from == to) return PathResult{{from}, 0.0, 0.0};
  const auto forward = detail::dijkstra(net, from, objective, false);
  if (forward[to] == detail::kUnreached) return std::nullopt;
  const auto backward = detail::dijkstra(net, to, objective, true);
  return detail::extract_lexicographic_path(net, from, to, objective, forward, backward);
}

inline std::optional<PathResult> shortest_path(const RoadNetwork& net, std::string_view from, std::string_view to,
                                               PathObjective objective = PathObjective::kMinCost) {
  return shortest_path(net, net.require(from), net.require(to), objective);
}

struct CostTime {
  double cost;
  double travel_time;
};

/// Cost/time table over ordered terminal pairs; absent entries are unreachable.
class PairTable {
 public:
  void set(Index from, Index to, CostTime value) { entries_[{from, to}] = value; }

  std::optional<CostTime> get(Index from, Index to) const {
    auto it = entries_.find({from, to});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<Index, Index>, CostTime> entries_;
};

inline PairTable all_pairs_costs(const RoadNetwork& net, std::span<const Index> terminals,
                                 PathObjective objective = PathObjective::kMinCost) {
  std::vector<Index> unique(terminals.begin(), terminals.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (Index t : unique) {
    if (t >= net.junction_count()) throw InputError("junction index out of range");
  }

  std::vector<std::vector<double>> backward;
  backward.reserve(unique.size());
  for (Index t : unique) backward.push_back(detail::dijkstra(net, t, objective, true));

  PairTable table;
  for (Index s : unique) {
    const auto forward = detail::dijkstra(net, s, objective, false);
    for (std::size_t k = 0; k < unique.size(); ++k) {
      const Index t = unique[k];
      if (s == t) {
        table.set(s, t, {0.0, 0.0});
        continue;
      }
      if (forward[t] == detail::kUnreached) continue;
      const auto path = detail::extract_lexicographic_path(net, s, t, objective, forward, backward[k]);
      table.set(s, t, {path.cost, path.travel_time});
    }
  }
  return table;
}

/// Reads `from_id,to_id,cost,travel_time_s` lines. Blank lines, `#` comments
/// and an optional header row are skipped; junctions are declared on first use.
inline RoadNetwork load_road_network(std::istream& in) {
  RoadNetwork net;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const auto fields = text::split_fields(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "from_id") continue;
    const auto where = "road network line " + std::to_string(line_no) + ": ";
    if (fields.size() != 4) throw InputError(where + "expected 4 fields");
    if (fields[0].empty() || fields[1].empty()) throw InputError(where + "empty junction id");
    const auto cost = text::parse_double(fields[2]);
    const auto time = text::parse_double(fields[3]);
    if (!cost) throw InputError(where + "unparsable cost");
    if (!time) throw InputError(where + "unparsable travel_time_s");
    net.add_junction(std::string(fields[0]));
    net.add_junction(std::string(fields[1]));
    try {
      net.add_segment(fields[0], fields[1], *cost, *time);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return net;
}

}  // namespace rideshare

#endif  // RIDESHARE_ROAD_NETWORK_HPP_
