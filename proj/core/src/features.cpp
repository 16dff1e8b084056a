#include "freeflow/features.hpp"

#include <cmath>

#include "freeflow/geo.hpp"

namespace freeflow {

TurnClass classify_turn(double deflection_deg) {
    const double a = std::abs(deflection_deg);
    if (a < 45.0) {
        return TurnClass::Straight;
    }
    if (a < 90.0) {
        return deflection_deg > 0.0 ? TurnClass::SlightRight : TurnClass::SlightLeft;
    }
    if (a < 135.0) {
        return deflection_deg > 0.0 ? TurnClass::Right : TurnClass::Left;
    }
    return TurnClass::UTurn;
}

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "naive_tt_s",  "n_signal",      "n_stop",  "n_crossing",     "n_give_way",
        "n_mini_roundabout", "n_left",  "n_slight_left", "n_right", "n_slight_right",
        "n_uturn",
    };
    return names;
}

std::array<double, kFeatureCount> FeatureVector::as_row() const {
    return {
        naive_tt_s,
        static_cast<double>(n_signal),
        static_cast<double>(n_stop),
        static_cast<double>(n_crossing),
        static_cast<double>(n_give_way),
        static_cast<double>(n_mini_roundabout),
        static_cast<double>(n_left),
        static_cast<double>(n_slight_left),
        static_cast<double>(n_right),
        static_cast<double>(n_slight_right),
        static_cast<double>(n_uturn),
    };
}

std::vector<double> route_deflections(const RoadNetwork& net, const Route& route) {
    std::vector<double> deflections;
    if (route.node_seq.size() < 3) {
        return deflections;
    }
    deflections.reserve(route.node_seq.size() - 2);
    for (std::size_t i = 1; i + 1 < route.node_seq.size(); ++i) {
        const GeoPoint& prev = net.node(route.node_seq[i - 1]).point;
        const GeoPoint& here = net.node(route.node_seq[i]).point;
        const GeoPoint& next = net.node(route.node_seq[i + 1]).point;
        const double incoming = bearing_deg(prev, here);
        const double outgoing = bearing_deg(here, next);
        deflections.push_back(normalize_deg(outgoing - incoming));
    }
    return deflections;
}

ControlCounts count_controls(const RoadNetwork& net, const Route& route) {
    ControlCounts counts;
    if (route.node_seq.size() < 3) {
        return counts;
    }
    for (std::size_t i = 1; i + 1 < route.node_seq.size(); ++i) {
        switch (net.node(route.node_seq[i]).control) {
            case ControlKind::Signal: ++counts.signal; break;
            case ControlKind::Stop: ++counts.stop; break;
            case ControlKind::Crossing: ++counts.crossing; break;
            case ControlKind::GiveWay: ++counts.give_way; break;
            case ControlKind::MiniRoundabout: ++counts.mini_roundabout; break;
            case ControlKind::None: break;
        }
    }
    return counts;
}

FeatureVector feature_vector(const RoadNetwork& net, const Route& route) {
    FeatureVector fv;
    fv.naive_tt_s = route.naive_tt_s;

    const ControlCounts controls = count_controls(net, route);
    fv.n_signal = controls.signal;
    fv.n_stop = controls.stop;
    fv.n_crossing = controls.crossing;
    fv.n_give_way = controls.give_way;
    fv.n_mini_roundabout = controls.mini_roundabout;

    for (const double deflection : route_deflections(net, route)) {
        switch (classify_turn(deflection)) {
            case TurnClass::Left: ++fv.n_left; break;
            case TurnClass::SlightLeft: ++fv.n_slight_left; break;
            case TurnClass::Right: ++fv.n_right; break;
            case TurnClass::SlightRight: ++fv.n_slight_right; break;
            case TurnClass::UTurn: ++fv.n_uturn; break;
            case TurnClass::Straight: break;  // reference category
        }
    }
    return fv;
}

}  // namespace freeflow
