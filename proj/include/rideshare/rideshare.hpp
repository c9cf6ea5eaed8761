#ifndef RIDESHARE_RIDESHARE_HPP_
#define RIDESHARE_RIDESHARE_HPP_

#include "rideshare/core.hpp"
#include "rideshare/road_network.hpp"
#include "rideshare/travel_model.hpp"
#include "rideshare/ride_planner.hpp"
#include "rideshare/cost_sharing.hpp"
#include "rideshare/stable_matcher.hpp"
#include "rideshare/blossom.hpp"
#include "rideshare/social_optimum.hpp"
#include "rideshare/metrics.hpp"
#include "rideshare/dataset.hpp"
#include "rideshare/experiment.hpp"

#endif  // RIDESHARE_RIDESHARE_HPP_
