#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "freeflow/network.hpp"
#include "freeflow/routing.hpp"

namespace freeflow {

/// Turn movement class of a signed bearing deflection. Positive deflection
/// is clockwise (a right turn in compass bearings).
enum class TurnClass {
    Straight,
    SlightLeft,
    Left,
    SlightRight,
    Right,
    UTurn,
};

/// Total classification of a deflection in (-180, 180]:
///   |d| in [0, 45)    -> Straight
///   |d| in [45, 90)   -> SlightRight / SlightLeft by sign
///   |d| in [90, 135)  -> Right / Left by sign
///   |d| in [135, 180] -> UTurn
TurnClass classify_turn(double deflection_deg);

inline constexpr std::size_t kFeatureCount = 11;

/// The 11 predictors in their fixed serialization order.
const std::array<std::string, kFeatureCount>& feature_names();

/// Per-route predictor set: naive traversal time, five traffic-control
/// counts, five turn counts. Straight movements are the reference category
/// and are not stored.
struct FeatureVector {
    double naive_tt_s = 0.0;
    std::uint32_t n_signal = 0;
    std::uint32_t n_stop = 0;
    std::uint32_t n_crossing = 0;
    std::uint32_t n_give_way = 0;
    std::uint32_t n_mini_roundabout = 0;
    std::uint32_t n_left = 0;
    std::uint32_t n_slight_left = 0;
    std::uint32_t n_right = 0;
    std::uint32_t n_slight_right = 0;
    std::uint32_t n_uturn = 0;

    std::array<double, kFeatureCount> as_row() const;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Signed bearing deflection at each interior route node, normalized into
/// (-180, 180]. Routes with fewer than 3 nodes yield an empty list.
/// Throws CoincidentPoints when consecutive route nodes share coordinates.
std::vector<double> route_deflections(const RoadNetwork& net, const Route& route);

struct ControlCounts {
    std::uint32_t signal = 0;
    std::uint32_t stop = 0;
    std::uint32_t crossing = 0;
    std::uint32_t give_way = 0;
    std::uint32_t mini_roundabout = 0;
};

/// Control occurrences over the interior nodes of the route; origin and
/// destination are excluded.
ControlCounts count_controls(const RoadNetwork& net, const Route& route);

/// The full 11-predictor vector for a route.
FeatureVector feature_vector(const RoadNetwork& net, const Route& route);

}  // namespace freeflow
