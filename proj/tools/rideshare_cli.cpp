// Command-line front end: gen, match, optimum, experiment, verify.
// Exit codes: 0 success, 1 input error, 2 invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rideshare/rideshare.hpp"

namespace rs = rideshare;

namespace {

struct InputOptions {
  std::string trips;
  std::string network;
  std::string requests;
  std::string mechanisms = "eq,ega,pp,sb";
  std::string out;
  std::string csv_dir;
  rs::ExperimentConfig config;
};

void add_input_options(CLI::App* cmd, InputOptions& o, bool mechanism_list) {
  cmd->add_option("--trips", o.trips, "trip CSV (geometric model)");
  cmd->add_option("--network", o.network, "road network CSV (from_id,to_id,cost,travel_time_s)");
  cmd->add_option("--requests", o.requests, "road requests CSV (use with --network)");
  if (mechanism_list) cmd->add_option("--mechanisms", o.mechanisms, "comma-separated subset of eq,ega,pp,sb");
  cmd->add_option("--pairing-window", o.config.pairing_window_s, "max departure gap of a pair, seconds");
  cmd->add_option("--fare-base", o.config.fare.fare_base, "fare per driven leg");
  cmd->add_option("--fare-per-km", o.config.fare.fare_per_km, "fare per km");
  cmd->add_option("--speed", o.config.fare.mean_speed_kmh, "mean speed, km/h");
  cmd->add_option("--detour-factor", o.config.detour_factor, "deadline stretch on the direct travel time");
  cmd->add_option("--slack-minutes", o.config.slack_minutes, "extra deadline slack");
  cmd->add_option("--seed", o.config.rng_seed, "seed echoed into the report");
  cmd->add_option("--oracle-limit", o.config.max_instance_size_for_oracle, "max commuters for brute-force check");
  cmd->add_option("--out", o.out, "write the JSON report here instead of stdout");
}

std::vector<rs::Mechanism> parse_mechanism_list(const std::string& list) {
  std::vector<rs::Mechanism> out;
  for (auto f : rs::text::split_fields(list)) {
    if (f.empty()) continue;
    const auto m = rs::parse_mechanism(f);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

struct Loaded {
  rs::ExperimentResult result;
  std::vector<rs::RowRejection> row_rejections;
};

Loaded load_and_run(const InputOptions& o) {
  o.config.validate();
  if (!o.trips.empty()) {
    if (!o.network.empty() || !o.requests.empty()) throw rs::InputError("use either --trips or --network/--requests");
    auto w = rs::ingest_trips(o.trips, o.config);
    return {rs::run_experiment(w.model, std::move(w.trips), o.config), std::move(w.rejections)};
  }
  if (o.network.empty() || o.requests.empty()) {
    throw rs::InputError("an input is required: --trips, or --network with --requests");
  }
  std::ifstream net_in(o.network);
  if (!net_in) throw rs::InputError("cannot open network file '" + o.network + "'");
  const auto net = rs::load_road_network(net_in);
  std::ifstream req_in(o.requests);
  if (!req_in) throw rs::InputError("cannot open request file '" + o.requests + "'");
  auto trips = rs::load_road_requests(req_in, net);
  std::vector<rs::Index> terminals;
  for (const auto& t : trips) {
    terminals.push_back(t.source);
    terminals.push_back(t.destination);
  }
  const rs::RoadTravelModel model(net, terminals);
  return {rs::run_experiment(model, std::move(trips), o.config), {}};
}

void emit(const rs::json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw rs::InputError("cannot write '" + out + "'");
  f << text;
}

void write_distributions(const rs::ExperimentResult& res, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& run : res.runs) {
    if (!run.report) continue;
    const auto& r = *run.report;
    const std::pair<const char*, const std::vector<double>*> series[] = {
        {"normalized_utility", &r.normalized_utilities},
        {"standalone_cost_ratio", &r.standalone_cost_ratios},
        {"delay_ratio", &r.delay_ratios},
        {"separation_km", &r.separation_distances_km}};
    for (const auto& [name, values] : series) {
      const auto path = std::filesystem::path(dir) / (std::string(rs::to_string(run.mechanism)) + "_" + name + ".csv");
      std::ofstream f(path);
      if (!f) throw rs::InputError("cannot write '" + path.string() + "'");
      f << name << '\n';
      for (double v : *values) f << rs::json(v).dump() << '\n';
    }
  }
}

rs::json verify_json(const rs::ExperimentResult& res, bool& ok) {
  const auto& g = res.graph;
  rs::json checks = rs::json::array();
  const auto check = [&](std::string name, bool pass, std::string detail = {}) {
    ok = ok && pass;
    checks.push_back({{"check", std::move(name)}, {"pass", pass}, {"detail", std::move(detail)}});
  };
  check("optimum savings identity",
        rs::approx_equal(res.optimum.social_cost, rs::cost_via_savings(g, res.optimum),
                         rs::kTolerance * std::max(1.0, res.optimum.social_cost)));
  if (res.brute_force_cost) {
    check("optimum equals brute force", rs::approx_equal(*res.brute_force_cost, res.optimum.social_cost));
  }
  for (const auto& run : res.runs) {
    const std::string m(rs::to_string(run.mechanism));
    const auto prefs = rs::build_preferences(run.mechanism, g);
    const auto cycles = rs::detect_cycles(prefs);
    if (run.stable) {
      const auto bp = rs::find_blocking_pair(run.stable->assignment, run.mechanism, g);
      check(m + ": no blocking pair", !bp, bp ? g.id(bp->first) + "," + g.id(bp->second) : "");
      check(m + ": proposals within budget", run.stable->proposals <= rs::proposal_budget(prefs));
      const double ratio = run.report->optimality_ratio;
      check(m + ": optimality ratio in [1, 1.5]", ratio >= 1.0 - 1e-9 && ratio <= 1.5 + 1e-9, rs::json(ratio).dump());
      if (run.mechanism != rs::Mechanism::kSegmentBased) check(m + ": preferences acyclic", cycles.empty());
    } else {
      bool confirmed = !run.cycles.empty();
      for (const auto& c : run.cycles) confirmed = confirmed && rs::is_cyclic_preference(prefs, c);
      check(m + ": reported cycles confirmed", confirmed);
    }
  }
  return checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable ride-sharing matcher with fair cost sharing"};
  app.require_subcommand(1);

  InputOptions opts;
  std::string single_mechanism = "eq";

  auto* match = app.add_subcommand("match", "stable assignment under one mechanism");
  add_input_options(match, opts, false);
  match->add_option("--mechanism", single_mechanism, "eq, ega, pp or sb");

  auto* optimum = app.add_subcommand("optimum", "socially optimal assignment");
  add_input_options(optimum, opts, false);

  auto* experiment = app.add_subcommand("experiment", "all mechanisms with metrics");
  add_input_options(experiment, opts, true);
  experiment->add_option("--csv-dir", opts.csv_dir, "also write per-distribution CSVs here");

  auto* verify = app.add_subcommand("verify", "stability and oracle checks");
  add_input_options(verify, opts, true);

  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  rs::BoundingBox box;
  auto* gen = app.add_subcommand("gen", "synthetic trip workload");
  gen->add_option("-n,--count", gen_n, "number of trips")->required();
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--out", gen_out, "output CSV (default stdout)");
  gen->add_option("--min-lon", box.min_lon);
  gen->add_option("--min-lat", box.min_lat);
  gen->add_option("--max-lon", box.max_lon);
  gen->add_option("--max-lat", box.max_lat);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const auto records = rs::generate_workload(gen_n, box, gen_seed);
      if (gen_out.empty()) {
        rs::write_trip_csv(std::cout, records);
      } else {
        std::ofstream f(gen_out, std::ios::binary);
        if (!f) throw rs::InputError("cannot write '" + gen_out + "'");
        rs::write_trip_csv(f, records);
      }
      return 0;
    }

    if (match->parsed()) {
      opts.config.mechanisms = {rs::parse_mechanism(single_mechanism)};
    } else if (optimum->parsed()) {
      opts.config.mechanisms = {rs::Mechanism::kEqual};
    } else {
      opts.config.mechanisms = parse_mechanism_list(opts.mechanisms);
    }
    const auto loaded = load_and_run(opts);
    const auto& res = loaded.result;

    if (optimum->parsed()) {
      auto doc = rs::assignment_json(res.optimum, res.graph);
      doc["brute_force_cost"] = res.brute_force_cost ? rs::number(*res.brute_force_cost) : rs::json(nullptr);
      doc["commuters"] = res.graph.size();
      emit(doc, opts.out);
      return 0;
    }
    if (verify->parsed()) {
      bool ok = true;
      rs::json doc{{"checks", verify_json(res, ok)}, {"ok", ok}};
      emit(doc, opts.out);
      return ok ? 0 : 2;
    }
    auto doc = rs::experiment_json(res, opts.config, loaded.row_rejections);
    if (match->parsed()) doc.erase("notes");
    emit(doc, opts.out);
    if (experiment->parsed() && !opts.csv_dir.empty()) write_distributions(res, opts.csv_dir);
    return 0;
  } catch (const rs::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const rs::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
