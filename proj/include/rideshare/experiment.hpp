#ifndef RIDESHARE_EXPERIMENT_HPP_
#define RIDESHARE_EXPERIMENT_HPP_

#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rideshare/core.hpp"
#include "rideshare/cost_sharing.hpp"
#include "rideshare/dataset.hpp"
#include "rideshare/metrics.hpp"
#include "rideshare/ride_planner.hpp"
#include "rideshare/road_network.hpp"
#include "rideshare/social_optimum.hpp"
#include "rideshare/stable_matcher.hpp"
#include "rideshare/text.hpp"

namespace rideshare {

/// Reads `commuter_id,source,destination,earliest_departure,latest_arrival`
/// rows, with junction names from `net` and epoch or ISO-8601 times.
inline std::vector<TripRequest> load_road_requests(std::istream& in, const RoadNetwork& net) {
  std::vector<TripRequest> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const auto f = text::split_fields(line);
    if (!f.empty() && f[0] == "commuter_id") continue;
    const auto where = "request line " + std::to_string(line_no) + ": ";
    if (f.size() != 5) throw InputError(where + "expected 5 fields");
    TripRequest t;
    t.commuter_id = std::string(f[0]);
    const auto src = net.find(f[1]);
    const auto dst = net.find(f[2]);
    if (!src) throw InputError(where + "unknown source junction '" + std::string(f[1]) + "'");
    if (!dst) throw InputError(where + "unknown destination junction '" + std::string(f[2]) + "'");
    t.source = *src;
    t.destination = *dst;
    const auto ed = parse_timestamp(f[3]);
    const auto la = parse_timestamp(f[4]);
    if (!ed) throw InputError(where + "earliest_departure: not a timestamp");
    if (!la) throw InputError(where + "latest_arrival: not a timestamp");
    t.earliest_departure = static_cast<double>(*ed);
    t.latest_arrival = static_cast<double>(*la);
    try {
      validate_trip(t);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct MechanismRun {
  Mechanism mechanism = Mechanism::kEqual;
  std::optional<StableMatch> stable;
  std::vector<std::vector<Index>> cycles;  // set when the run hit a cyclic preference
  std::size_t failed_proposals = 0;        // proposals spent before giving up
  std::optional<MechanismReport> report;
};

struct ExperimentResult {
  MatchingGraph graph;
  Assignment optimum;
  std::optional<double> brute_force_cost;  // only for instances within the oracle limit
  std::vector<MechanismRun> runs;
};

/// Builds the matching graph once, then per mechanism: preferences, proposal
/// algorithm, blocking-pair verification and metrics against the optimum.
inline ExperimentResult run_mechanisms(MatchingGraph g, const ExperimentConfig& config) {
  ExperimentResult res{std::move(g), {}, std::nullopt, {}};
  const auto& graph = res.graph;
  res.optimum = social_optimum(graph);
  if (graph.size() <= config.max_instance_size_for_oracle && graph.size() <= kBruteForceLimit) {
    const auto oracle = brute_force_optimum(graph);
    ensure(approx_equal(oracle.social_cost, res.optimum.social_cost), "social optimum disagrees with brute force");
    res.brute_force_cost = oracle.social_cost;
  }
  for (Mechanism mech : config.mechanisms) {
    MechanismRun run;
    run.mechanism = mech;
    const auto prefs = build_preferences(mech, graph);
    auto outcome = stable_match(prefs, graph);
    if (auto* ok = std::get_if<StableMatch>(&outcome)) {
      if (auto bp = find_blocking_pair(ok->assignment, mech, graph)) {
        throw InvariantError("stable assignment under " + std::string(to_string(mech)) + " is blocked by ('" +
                             graph.id(bp->first) + "', '" + graph.id(bp->second) + "')");
      }
      run.report = evaluate_mechanism(ok->assignment, res.optimum, mech, graph);
      run.stable = std::move(*ok);
    } else {
      run.cycles = std::get<CyclicFailure>(outcome).cycles;
      run.failed_proposals = std::get<CyclicFailure>(outcome).proposals;
    }
    res.runs.push_back(std::move(run));
  }
  return res;
}

template <TravelModel Model>
ExperimentResult run_experiment(const Model& model, std::vector<TripRequest> trips, const ExperimentConfig& config) {
  config.validate();
  if (trips.empty()) throw InputError("experiment needs at least one trip");
  return run_mechanisms(build_matching_graph(model, std::move(trips), config.pairing_window_s), config);
}

// JSON -----------------------------------------------------------------------

using json = nlohmann::json;

/// Non-finite numbers become null so every report is valid JSON.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json assignment_json(const Assignment& a, const MatchingGraph& g) {
  json pairs = json::array();
  for (auto [i, j] : a.pairs) pairs.push_back({g.id(i), g.id(j)});
  json singles = json::array();
  for (Index s : a.singletons) singles.push_back(g.id(s));
  return {{"pairs", pairs}, {"singletons", singles}, {"social_cost", number(a.social_cost)}};
}

inline json pair_rides_json(const Assignment& a, Mechanism mech, const MatchingGraph& g) {
  json rides = json::array();
  for (auto [i, j] : a.pairs) {
    const auto& e = g.edge(*g.edge_between(i, j));
    const auto pay = payments(mech, e.plan, g.self_cost(e.i), g.self_cost(e.j));
    const int x = e.plan.first_party;
    rides.push_back({{"commuters", {g.id(e.i), g.id(e.j)}},
                     {"kind", to_string(e.plan.kind)},
                     {"first", g.id(x == 0 ? e.i : e.j)},
                     {"cost", number(e.cost)},
                     {"payments", {number(pay.payment[0]), number(pay.payment[1])}}});
  }
  return rides;
}

inline json report_json(const MechanismReport& r) {
  const auto list = [](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(number(x));
    return arr;
  };
  return {{"social_cost", number(r.social_cost)},
          {"optimal_cost", number(r.optimal_cost)},
          {"optimality_ratio", number(r.optimality_ratio)},
          {"social_utility", number(r.social_utility)},
          {"matched_fraction", number(r.matched_fraction)},
          {"commuters", r.commuters},
          {"matched_commuters", r.matched_commuters},
          {"unmatched_commuters", r.unmatched_commuters},
          {"matched_pairs", r.matched_pairs},
          {"normalized_utilities", list(r.normalized_utilities)},
          {"standalone_cost_ratios", list(r.standalone_cost_ratios)},
          {"delay_ratios", list(r.delay_ratios)},
          {"separation_distances_km", list(r.separation_distances_km)}};
}

inline json run_json(const MechanismRun& run, const MatchingGraph& g) {
  json out;
  if (run.stable) {
    out = report_json(*run.report);
    out["status"] = "stable";
    out["assignment"] = assignment_json(run.stable->assignment, g);
    out["rides"] = pair_rides_json(run.stable->assignment, run.mechanism, g);
    out["proposals"] = run.stable->proposals;
  } else {
    json cycles = json::array();
    for (const auto& c : run.cycles) {
      json ids = json::array();
      for (Index i : c) ids.push_back(g.id(i));
      cycles.push_back(ids);
    }
    out = {{"status", "cyclic_failure"}, {"cycles", cycles}, {"proposals", run.failed_proposals}};
  }
  return out;
}

inline json config_json(const ExperimentConfig& c) {
  json mechs = json::array();
  for (Mechanism m : c.mechanisms) mechs.push_back(to_string(m));
  return {{"mechanisms", mechs},
          {"pairing_window_s", number(c.pairing_window_s)},
          {"fare_base", number(c.fare.fare_base)},
          {"fare_per_km", number(c.fare.fare_per_km)},
          {"mean_speed_kmh", number(c.fare.mean_speed_kmh)},
          {"detour_factor", number(c.detour_factor)},
          {"slack_minutes", number(c.slack_minutes)},
          {"rng_seed", c.rng_seed},
          {"max_instance_size_for_oracle", c.max_instance_size_for_oracle}};
}

/// The full run report. Keys are sorted and no timings are included, so the
/// same input and config always serialize to the same bytes.
inline json experiment_json(const ExperimentResult& res, const ExperimentConfig& config,
                            const std::vector<RowRejection>& row_rejections = {}) {
  const auto& g = res.graph;
  json rejected = json::array();
  for (const auto& r : row_rejections) {
    rejected.push_back({{"line", r.line}, {"record_id", r.record_id}, {"reason", r.reason}});
  }
  for (const auto& r : g.rejections()) rejected.push_back({{"record_id", r.commuter_id}, {"reason", r.reason}});

  json mechanisms = json::object();
  for (const auto& run : res.runs) mechanisms[std::string(to_string(run.mechanism))] = run_json(run, g);

  json optimum = assignment_json(res.optimum, g);
  optimum["brute_force_cost"] = res.brute_force_cost ? number(*res.brute_force_cost) : json(nullptr);

  double standalone_total = 0.0;
  for (Index i = 0; i < g.size(); ++i) standalone_total += g.self_cost(i);

  return {{"config", config_json(config)},
          {"instance",
           {{"commuters", g.size()},
            {"pair_edges", g.edges().size()},
            {"standalone_cost_total", number(standalone_total)},
            {"rejected", rejected}}},
          {"optimum", optimum},
          {"mechanisms", mechanisms},
          {"notes",
           {"optimality ratios are bounded by 1.5 for all four mechanisms",
            "field observations of ratios at or below about 1.2 are indicative only; this workload is synthetic"}}};
}

}  // namespace rideshare

#endif  // RIDESHARE_EXPERIMENT_HPP_
