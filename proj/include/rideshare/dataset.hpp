#ifndef RIDESHARE_DATASET_HPP_
#define RIDESHARE_DATASET_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/cost_sharing.hpp"
#include "rideshare/ride_planner.hpp"
#include "rideshare/text.hpp"
#include "rideshare/travel_model.hpp"

namespace rideshare {

struct TripRecord {
  std::string record_id;
  double pickup_lon = 0.0;
  double pickup_lat = 0.0;
  double dropoff_lon = 0.0;
  double dropoff_lat = 0.0;
  std::int64_t pickup_time = 0;  // epoch seconds
  std::optional<double> trip_distance_km;
  std::optional<double> slack_minutes;
};

struct ExperimentConfig {
  std::vector<Mechanism> mechanisms{kAllMechanisms.begin(), kAllMechanisms.end()};
  double pairing_window_s = 180.0;
  // Distance-proportional by default: a per-leg base would charge every shared
  // ride one flag-fall more than the two standalone rides it replaces.
  FareModel fare{0.0, 1.55, 20.0};
  double detour_factor = 1.5;
  double slack_minutes = 10.0;
  std::uint64_t rng_seed = 0;
  std::size_t max_instance_size_for_oracle = 12;

  void validate() const {
    if (!(pairing_window_s >= 0.0)) throw InputError("pairing_window_s must be >= 0");
    if (!(fare.fare_base >= 0.0) || !(fare.fare_per_km >= 0.0)) throw InputError("fares must be >= 0");
    if (!(fare.mean_speed_kmh > 0.0)) throw InputError("mean_speed_kmh must be > 0");
    if (!(detour_factor >= 1.0)) throw InputError("detour_factor must be >= 1");
    if (!(slack_minutes >= 0.0)) throw InputError("slack_minutes must be >= 0");
    if (mechanisms.empty()) throw InputError("at least one mechanism is required");
  }
};

/// Parses epoch seconds or an ISO-8601 timestamp
/// (YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]); no zone means UTC.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  if (auto v = text::parse_double(s)) {
    if (!std::isfinite(*v) || std::fabs(*v) > 1e15) return std::nullopt;
    return static_cast<std::int64_t>(std::floor(*v));
  }
  std::size_t pos = 0;
  const auto number = [&](std::size_t digits) -> std::optional<int> {
    if (pos + digits > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      const char c = s[pos + k];
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    pos += digits;
    return v;
  };
  const auto expect = [&](char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  };
  const auto y = number(4);
  if (!y || !expect('-')) return std::nullopt;
  const auto mo = number(2);
  if (!mo || !expect('-')) return std::nullopt;
  const auto d = number(2);
  if (!d || !(expect('T') || expect(' '))) return std::nullopt;
  const auto hh = number(2);
  if (!hh || !expect(':')) return std::nullopt;
  const auto mi = number(2);
  if (!mi) return std::nullopt;
  int ss = 0;
  if (expect(':')) {
    const auto sec = number(2);
    if (!sec) return std::nullopt;
    ss = *sec;
    if (expect('.')) {
      std::size_t frac = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos, ++frac;
      if (frac == 0) return std::nullopt;
    }
  }
  int offset_s = 0;
  if (pos < s.size()) {
    if (expect('Z')) {
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      const auto oh = number(2);
      if (!oh) return std::nullopt;
      expect(':');
      const auto om = number(2);
      if (!om || *oh > 23 || *om > 59) return std::nullopt;
      offset_s = sign * (*oh * 3600 + *om * 60);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size() || *hh > 23 || *mi > 59 || ss > 60) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + *hh * 3600 + *mi * 60 + ss - offset_s;
}

inline std::string format_timestamp(std::int64_t epoch) {
  const std::int64_t days = epoch >= 0 ? epoch / 86400 : (epoch - 86399) / 86400;
  const std::int64_t rem = epoch - days * 86400;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

struct RowRejection {
  std::size_t line = 0;
  std::string record_id;
  std::string reason;
};

/// Trips bound to a geometric model (two points per trip: pickup, drop-off).
struct Workload {
  GeometricModel model;
  std::vector<TripRequest> trips;
  std::vector<RowRejection> rejections;
};

inline const std::vector<std::string>& trip_csv_columns() {
  static const std::vector<std::string> kColumns{"record_id",   "pickup_lon",  "pickup_lat",       "dropoff_lon",
                                                 "dropoff_lat", "pickup_time", "trip_distance_km", "slack_minutes"};
  return kColumns;
}

/// Checks one record; returns the reason it is unusable, or empty.
inline std::string record_problem(const TripRecord& r) {
  if (r.record_id.empty()) return "record_id is empty";
  if (!(r.pickup_lon >= -180.0 && r.pickup_lon <= 180.0)) return "pickup_lon out of range [-180, 180]";
  if (!(r.pickup_lat >= -90.0 && r.pickup_lat <= 90.0)) return "pickup_lat out of range [-90, 90]";
  if (!(r.dropoff_lon >= -180.0 && r.dropoff_lon <= 180.0)) return "dropoff_lon out of range [-180, 180]";
  if (!(r.dropoff_lat >= -90.0 && r.dropoff_lat <= 90.0)) return "dropoff_lat out of range [-90, 90]";
  if (r.trip_distance_km && !(*r.trip_distance_km > 0.0 && *r.trip_distance_km < 1e6)) {
    return "trip_distance_km must be > 0";
  }
  if (r.slack_minutes && !(*r.slack_minutes >= 0.0 && *r.slack_minutes < 1e6)) return "slack_minutes must be >= 0";
  if (r.pickup_lon == r.dropoff_lon && r.pickup_lat == r.dropoff_lat) return "pickup and drop-off coincide";
  return {};
}

/// Turns valid records into requests on a fresh geometric model. The window is
/// [pickup, pickup + direct time × detour_factor + slack].
inline Workload build_workload(const std::vector<TripRecord>& records, const ExperimentConfig& config,
                               const std::vector<std::size_t>& lines = {}) {
  config.validate();
  Workload w{GeometricModel(config.fare), {}, {}};
  std::set<std::string> seen;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const std::size_t line = k < lines.size() ? lines[k] : k + 1;
    if (auto problem = record_problem(r); !problem.empty()) {
      w.rejections.push_back({line, r.record_id, problem});
      continue;
    }
    if (!seen.insert(r.record_id).second) {
      w.rejections.push_back({line, r.record_id, "record_id: duplicate"});
      continue;
    }
    const LonLat pickup{r.pickup_lon, r.pickup_lat};
    const LonLat dropoff{r.dropoff_lon, r.dropoff_lat};
    const double km = r.trip_distance_km.value_or(great_circle_km(pickup, dropoff));
    const double direct_s = km / config.fare.mean_speed_kmh * 3600.0;
    const double slack_s = r.slack_minutes.value_or(config.slack_minutes) * 60.0;
    TripRequest t;
    t.commuter_id = r.record_id;
    t.source = w.model.add_point(pickup);
    t.destination = w.model.add_point(dropoff);
    t.earliest_departure = static_cast<double>(r.pickup_time);
    t.latest_arrival = t.earliest_departure + direct_s * config.detour_factor + slack_s;
    w.trips.push_back(std::move(t));
  }
  return w;
}

/// Parses the trip CSV. Structural problems (missing/unknown header columns,
/// unreadable input) are fatal; bad rows are rejected with line numbers.
inline Workload ingest_trips(std::istream& in, const ExperimentConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    auto header = text::split_fields(line);
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].remove_prefix(3);
    const auto& known = trip_csv_columns();
    for (std::size_t k = 0; k < header.size(); ++k) {
      const std::string name(header[k]);
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw InputError("trip file line " + std::to_string(line_no) + ": unknown column '" + name + "'");
      }
      if (!column.emplace(name, k).second) {
        throw InputError("trip file line " + std::to_string(line_no) + ": duplicate column '" + name + "'");
      }
    }
    for (std::size_t k = 0; k < 6; ++k) {
      if (!column.count(known[k])) {
        throw InputError("trip file line " + std::to_string(line_no) + ": missing column '" + known[k] + "'");
      }
    }
    break;
  }
  if (column.empty()) throw InputError("trip file has no header");

  std::vector<TripRecord> records;
  std::vector<std::size_t> lines;
  std::vector<RowRejection> early;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const auto fields = text::split_fields(line);
    TripRecord r;
    const auto field = [&](const std::string& name) -> std::optional<std::string_view> {
      auto it = column.find(name);
      if (it == column.end() || it->second >= fields.size()) return std::nullopt;
      return fields[it->second];
    };
    if (auto id = field("record_id")) r.record_id = std::string(*id);
    std::string problem;
    if (fields.size() != column.size()) {
      problem = "expected " + std::to_string(column.size()) + " fields, found " + std::to_string(fields.size());
    }
    const auto number = [&](const char* name, double& out) {
      if (!problem.empty()) return;
      const auto v = text::parse_double(field(name).value_or(""));
      if (!v || !std::isfinite(*v)) {
        problem = std::string(name) + ": not a number";
        return;
      }
      out = *v;
    };
    const auto optional_number = [&](const char* name, std::optional<double>& out) {
      if (!problem.empty()) return;
      const auto raw = field(name);
      if (!raw || raw->empty()) return;
      const auto v = text::parse_double(*raw);
      if (!v || !std::isfinite(*v)) {
        problem = std::string(name) + ": not a number";
        return;
      }
      out = *v;
    };
    number("pickup_lon", r.pickup_lon);
    number("pickup_lat", r.pickup_lat);
    number("dropoff_lon", r.dropoff_lon);
    number("dropoff_lat", r.dropoff_lat);
    if (problem.empty()) {
      if (auto t = parse_timestamp(field("pickup_time").value_or(""))) {
        r.pickup_time = *t;
      } else {
        problem = "pickup_time: not an epoch or ISO-8601 timestamp";
      }
    }
    optional_number("trip_distance_km", r.trip_distance_km);
    optional_number("slack_minutes", r.slack_minutes);
    if (!problem.empty()) {
      early.push_back({line_no, r.record_id, problem});
      continue;
    }
    records.push_back(std::move(r));
    lines.push_back(line_no);
  }
  if (in.bad()) throw InputError("error while reading trip file");
  auto w = build_workload(records, config, lines);
  w.rejections.insert(w.rejections.end(), early.begin(), early.end());
  std::stable_sort(w.rejections.begin(), w.rejections.end(),
                   [](const RowRejection& a, const RowRejection& b) { return a.line < b.line; });
  return w;
}

inline Workload ingest_trips(const std::string& path, const ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trip file '" + path + "'");
  return ingest_trips(in, config);
}

inline void write_trip_csv(std::ostream& out, const std::vector<TripRecord>& records) {
  const auto& cols = trip_csv_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%lld,", r.record_id.c_str(), r.pickup_lon, r.pickup_lat,
                  r.dropoff_lon, r.dropoff_lat, static_cast<long long>(r.pickup_time));
    out << buf;
    if (r.trip_distance_km) {
      std::snprintf(buf, sizeof buf, "%.3f", *r.trip_distance_km);
      out << buf;
    }
    out << ',';
    if (r.slack_minutes) {
      std::snprintf(buf, sizeof buf, "%.3f", *r.slack_minutes);
      out << buf;
    }
    out << '\n';
  }
}

struct BoundingBox {
  double min_lon = -74.05;
  double min_lat = 40.60;
  double max_lon = -73.85;
  double max_lat = 40.85;
};

struct WorkloadShape {
  std::int64_t start_time = 1361620800;  // 2013-02-23T12:00:00Z
  double window_s = 3600.0;
  std::size_t hotspots = 8;
  double hotspot_share = 0.8;      // remaining pickups are uniform over the box
  double hotspot_sigma_km = 0.6;
  double mean_trip_km = 4.2;
  double trip_log_sigma = 0.6;
};

namespace detail {

/// Portable draws on top of mt19937_64 (the std distributions are
/// implementation-defined).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

inline constexpr double kKmPerDegLat = 111.195;

}  // namespace detail

/// Synthetic taxi-like trips: pickups clustered around hotspots, log-normal
/// trip lengths, pickup times uniform over the window. Same seed, same list.
inline std::vector<TripRecord> generate_workload(std::size_t n, const BoundingBox& box, std::uint64_t seed,
                                                 const WorkloadShape& shape = {}) {
  if (!(box.min_lon < box.max_lon && box.min_lat < box.max_lat) || box.min_lon < -180.0 || box.max_lon > 180.0 ||
      box.min_lat < -90.0 || box.max_lat > 90.0) {
    throw InputError("degenerate or invalid bounding box");
  }
  if (shape.hotspots == 0 || !(shape.window_s > 0.0) || !(shape.mean_trip_km > 0.0)) {
    throw InputError("invalid workload shape");
  }
  detail::Draw draw(seed);
  const double mid_lat = (box.min_lat + box.max_lat) / 2.0;
  const double km_per_deg_lon = detail::kKmPerDegLat * std::cos(mid_lat * std::numbers::pi / 180.0);
  const auto inside = [&](double lon, double lat) {
    return lon >= box.min_lon && lon <= box.max_lon && lat >= box.min_lat && lat <= box.max_lat;
  };

  std::vector<LonLat> hotspots;
  for (std::size_t h = 0; h < shape.hotspots; ++h) {
    hotspots.push_back({draw.uniform(box.min_lon, box.max_lon), draw.uniform(box.min_lat, box.max_lat)});
  }
  const double log_mu = std::log(shape.mean_trip_km) - shape.trip_log_sigma * shape.trip_log_sigma / 2.0;

  std::vector<TripRecord> out;
  out.reserve(n);
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  for (std::size_t k = 0; k < n; ++k) {
    TripRecord r;
    const auto digits = std::to_string(k);
    r.record_id = "t" + std::string(width - digits.size(), '0') + digits;

    LonLat pickup;
    do {
      if (draw.uniform() < shape.hotspot_share) {
        const auto& c = hotspots[static_cast<std::size_t>(draw.uniform() * hotspots.size()) % hotspots.size()];
        pickup.lon = c.lon + draw.normal() * shape.hotspot_sigma_km / km_per_deg_lon;
        pickup.lat = c.lat + draw.normal() * shape.hotspot_sigma_km / detail::kKmPerDegLat;
      } else {
        pickup = {draw.uniform(box.min_lon, box.max_lon), draw.uniform(box.min_lat, box.max_lat)};
      }
    } while (!inside(pickup.lon, pickup.lat));

    LonLat dropoff;
    for (int attempt = 0;; ++attempt) {
      const double km = std::exp(log_mu + shape.trip_log_sigma * draw.normal());
      const double bearing = draw.uniform(0.0, 2.0 * std::numbers::pi);
      dropoff.lon = pickup.lon + km * std::cos(bearing) / km_per_deg_lon;
      dropoff.lat = pickup.lat + km * std::sin(bearing) / detail::kKmPerDegLat;
      if (inside(dropoff.lon, dropoff.lat) && km > 0.05) break;
      if (attempt > 1000) throw InputError("bounding box too small for the trip-length distribution");
    }
    // Round to the precision written to CSV so records survive a round trip.
    const auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
    r.pickup_lon = round6(pickup.lon);
    r.pickup_lat = round6(pickup.lat);
    r.dropoff_lon = round6(dropoff.lon);
    r.dropoff_lat = round6(dropoff.lat);
    r.pickup_time = shape.start_time + static_cast<std::int64_t>(std::floor(draw.uniform() * shape.window_s));
    r.trip_distance_km = std::round(great_circle_km({r.pickup_lon, r.pickup_lat}, {r.dropoff_lon, r.dropoff_lat}) *
                                    1e3) / 1e3;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rideshare

#endif  // RIDESHARE_DATASET_HPP_
