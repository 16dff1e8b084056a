#include "freeflow/synth.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "freeflow/errors.hpp"
#include "freeflow/geo.hpp"
#include "freeflow/rng.hpp"

namespace freeflow {

namespace {

constexpr double kGridSpacingDeg = 0.002;

void validate_probs(const ControlProbabilities& p) {
    const double values[] = {p.signal, p.stop, p.crossing, p.give_way, p.mini_roundabout};
    double sum = 0.0;
    for (const double v : values) {
        if (!(v >= 0.0)) {
            throw BadProbabilities("control probabilities must be >= 0");
        }
        sum += v;
    }
    if (sum > 1.0) {
        throw BadProbabilities("control probabilities sum to " + std::to_string(sum) + " > 1");
    }
}

ControlKind draw_control(rng::SplitMix64& gen, const ControlProbabilities& p) {
    const double u = gen.next_double();
    double edge = p.signal;
    if (u < edge) return ControlKind::Signal;
    edge += p.stop;
    if (u < edge) return ControlKind::Stop;
    edge += p.crossing;
    if (u < edge) return ControlKind::Crossing;
    edge += p.give_way;
    if (u < edge) return ControlKind::GiveWay;
    edge += p.mini_roundabout;
    if (u < edge) return ControlKind::MiniRoundabout;
    return ControlKind::None;
}

}  // namespace

RoadNetwork grid_network(int rows, int cols, std::uint64_t seed, const ControlProbabilities& probs,
                         std::span<const double> speed_set_kph) {
    if (rows < 2 || cols < 2) {
        throw Error("grid_network: rows and cols must both be >= 2");
    }
    validate_probs(probs);
    if (speed_set_kph.empty()) {
        throw Error("grid_network: speed set must not be empty");
    }
    for (const double s : speed_set_kph) {
        if (!(s > 0.0)) {
            throw NonPositiveInput("grid_network: speeds must be > 0");
        }
    }

    rng::SplitMix64 gen(seed);
    const auto node_id = [cols](int r, int c) {
        return static_cast<NodeId>(r) * static_cast<NodeId>(cols) + static_cast<NodeId>(c);
    };
    const auto point_of = [](int r, int c) {
        return GeoPoint{r * kGridSpacingDeg, c * kGridSpacingDeg};
    };

    std::vector<RoadNode> nodes;
    nodes.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            nodes.push_back(RoadNode{node_id(r, c), point_of(r, c), draw_control(gen, probs)});
        }
    }

    std::vector<RoadEdge> edges;
    EdgeId next_edge = 0;
    const auto add_street = [&](int r1, int c1, int r2, int c2) {
        const double speed = speed_set_kph[gen.next_below(speed_set_kph.size())];
        const double length = haversine_m(point_of(r1, c1), point_of(r2, c2));
        edges.push_back(RoadEdge{next_edge++, node_id(r1, c1), node_id(r2, c2), length, speed, 0.0});
        edges.push_back(RoadEdge{next_edge++, node_id(r2, c2), node_id(r1, c1), length, speed, 0.0});
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                add_street(r, c, r, c + 1);
            }
            if (r + 1 < rows) {
                add_street(r, c, r + 1, c);
            }
        }
    }
    return RoadNetwork::create(std::move(nodes), std::move(edges));
}

double synthetic_truth(const FeatureVector& fv, const DelayModel& model, std::uint64_t seed,
                       std::int64_t pair_id) {
    double t = fv.naive_tt_s * (1.0 + model.gamma);
    t += fv.n_signal * model.signal_s;
    t += fv.n_stop * model.stop_s;
    t += fv.n_crossing * model.crossing_s;
    t += fv.n_give_way * model.give_way_s;
    t += fv.n_mini_roundabout * model.mini_roundabout_s;
    t += fv.n_left * model.left_s;
    t += fv.n_slight_left * model.slight_left_s;
    t += fv.n_right * model.right_s;
    t += fv.n_slight_right * model.slight_right_s;
    t += fv.n_uturn * model.uturn_s;

    rng::SplitMix64 gen(rng::derive_seed(seed, static_cast<std::uint64_t>(pair_id)));
    t += gen.next_normal(0.0, model.noise_sigma_s);
    return std::max(t, 1.0);
}

}  // namespace freeflow
