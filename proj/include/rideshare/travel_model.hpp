#ifndef RIDESHARE_TRAVEL_MODEL_HPP_
#define RIDESHARE_TRAVEL_MODEL_HPP_

#include <cmath>
#include <concepts>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rideshare/core.hpp"
#include "rideshare/road_network.hpp"

namespace rideshare {

/// Cost, duration and length of driving between two locations.
struct Leg {
  double cost = 0.0;
  double travel_time = 0.0;  // seconds
  double distance_km = 0.0;
};

/// A travel model answers min-cost leg queries between location indices.
/// Identical locations must yield a zero leg.
template <class M>
concept TravelModel = requires(const M& model, Index a, Index b) {
  { model.leg(a, b) } -> std::convertible_to<std::optional<Leg>>;
};

/// Models that also know where locations are on the globe.
template <class M>
concept GeoTravelModel = TravelModel<M> && requires(const M& model, Index a, Index b) {
  { model.separation_km(a, b) } -> std::convertible_to<double>;
};

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0088;

inline double great_circle_km(LonLat a, LonLat b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

struct FareModel {
  double fare_base = 0.0;    // charged per driven leg of non-zero length
  double fare_per_km = 1.0;
  double mean_speed_kmh = 20.0;
};

/// Implicit complete graph over a set of points. A leg between distinct
/// positions costs `fare_base + fare_per_km * km` and takes `km / speed`.
class GeometricModel {
 public:
  explicit GeometricModel(FareModel fare) : fare_(fare) {
    if (!(fare.fare_base >= 0.0) || !(fare.fare_per_km >= 0.0)) throw InputError("fares must be >= 0");
    if (!(fare.mean_speed_kmh > 0.0) || !std::isfinite(fare.mean_speed_kmh)) {
      throw InputError("mean speed must be > 0");
    }
  }

  Index add_point(LonLat p) {
    points_.push_back(p);
    return points_.size() - 1;
  }

  const LonLat& point(Index i) const { return points_.at(i); }
  std::size_t size() const { return points_.size(); }
  const FareModel& fare() const { return fare_; }

  std::optional<Leg> leg(Index a, Index b) const {
    if (a == b) return Leg{};
    const double km = great_circle_km(points_.at(a), points_.at(b));
    if (km == 0.0) return Leg{};
    return Leg{fare_.fare_base + fare_.fare_per_km * km, km / fare_.mean_speed_kmh * 3600.0, km};
  }

  double separation_km(Index a, Index b) const { return great_circle_km(points_.at(a), points_.at(b)); }

 private:
  FareModel fare_;
  std::vector<LonLat> points_;
};

/// Road-network model over a fixed terminal set. Legs follow min-cost routes;
/// the reported length is the route cost, the only length the network carries.
class RoadTravelModel {
 public:
  RoadTravelModel(const RoadNetwork& net, std::span<const Index> terminals)
      : table_(all_pairs_costs(net, terminals, PathObjective::kMinCost)) {}

  std::optional<Leg> leg(Index a, Index b) const {
    if (a == b) return Leg{};
    const auto entry = table_.get(a, b);
    if (!entry) return std::nullopt;
    return Leg{entry->cost, entry->travel_time, entry->cost};
  }

 private:
  PairTable table_;
};

static_assert(TravelModel<RoadTravelModel>);
static_assert(GeoTravelModel<GeometricModel>);

}  // namespace rideshare

#endif  // RIDESHARE_TRAVEL_MODEL_HPP_
