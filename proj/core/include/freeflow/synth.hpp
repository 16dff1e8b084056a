#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "freeflow/features.hpp"
#include "freeflow/network.hpp"

namespace freeflow {

/// Ground-truth delay structure for the synthetic reference oracle:
/// per-control and per-turn delay seconds, a multiplicative surcharge on
/// the naive time, and Gaussian noise. The defaults are harness
/// configuration, not calibrated to any real city.
struct DelayModel {
    double signal_s = 25.0;
    double stop_s = 8.0;
    double crossing_s = 3.0;
    double give_way_s = 4.0;
    double mini_roundabout_s = 6.0;

    double left_s = 10.0;
    double slight_left_s = 4.0;
    double right_s = 5.0;
    double slight_right_s = 2.0;
    double uturn_s = 20.0;
    double straight_s = 0.0;  // reference category; unused by the oracle

    double gamma = 0.10;
    double noise_sigma_s = 10.0;
};

/// Per-kind probabilities that a grid node carries a control element;
/// the remainder is ControlKind::None. Must each be >= 0 and sum to <= 1.
struct ControlProbabilities {
    double signal = 0.10;
    double stop = 0.15;
    double crossing = 0.12;
    double give_way = 0.02;
    double mini_roundabout = 0.01;
};

inline constexpr std::array<double, 3> kDefaultGridSpeedsKph = {30.0, 50.0, 70.0};

/// rows x cols lattice with 0.002 degree spacing (~222 m) anchored at
/// (0, 0), bidirectional edges, one speed draw per undirected street taken
/// from speed_set_kph, node controls drawn from probs. Control draws happen
/// first (node id order), then speed draws (row-major, right then down).
/// Deterministic in seed and strongly connected by construction.
/// Throws BadProbabilities.
RoadNetwork grid_network(int rows, int cols, std::uint64_t seed,
                         const ControlProbabilities& probs = {},
                         std::span<const double> speed_set_kph = kDefaultGridSpeedsKph);

/// Reference travel time for a feature vector:
///   t = naive * (1 + gamma) + sum(control counts * control delays)
///     + sum(turn counts * turn delays) + Normal(0, noise_sigma_s),
/// noise seeded by rng::derive_seed(seed, pair_id), truncated to t >= 1 s.
double synthetic_truth(const FeatureVector& fv, const DelayModel& model, std::uint64_t seed,
                       std::int64_t pair_id);

}  // namespace freeflow
