#include <doctest.h>

#include <cmath>
#include <map>

#include "freeflow/errors.hpp"
#include "freeflow/synth.hpp"

using namespace freeflow;

TEST_CASE("grid_network: 3x3 lattice has 9 nodes and 24 directed edges") {
    const RoadNetwork net = grid_network(3, 3, 1);
    CHECK(net.node_count() == 9);
    CHECK(net.edge_count() == 24);  // 12 undirected lattice edges * 2
}

TEST_CASE("grid_network: zero probabilities mean no controls") {
    ControlProbabilities probs;
    probs.signal = probs.stop = probs.crossing = probs.give_way = probs.mini_roundabout = 0.0;
    const RoadNetwork net = grid_network(4, 4, 2, probs);
    for (const RoadNode& n : net.nodes()) {
        CHECK(n.control == ControlKind::None);
    }
}

TEST_CASE("grid_network: deterministic in the seed") {
    const RoadNetwork a = grid_network(5, 4, 99);
    const RoadNetwork b = grid_network(5, 4, 99);
    REQUIRE(a.node_count() == b.node_count());
    REQUIRE(a.edge_count() == b.edge_count());
    for (std::size_t i = 0; i < a.node_count(); ++i) {
        CHECK(a.nodes()[i].id == b.nodes()[i].id);
        CHECK(a.nodes()[i].control == b.nodes()[i].control);
    }
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        CHECK(a.edges()[i].speed_kph == b.edges()[i].speed_kph);
        CHECK(a.edges()[i].from_node == b.edges()[i].from_node);
    }
    const RoadNetwork c = grid_network(5, 4, 100);
    bool differs = false;
    for (std::size_t i = 0; i < a.node_count() && !differs; ++i) {
        differs = a.nodes()[i].control != c.nodes()[i].control;
    }
    for (std::size_t i = 0; i < a.edge_count() && !differs; ++i) {
        differs = a.edges()[i].speed_kph != c.edges()[i].speed_kph;
    }
    CHECK(differs);
}

TEST_CASE("grid_network: strongly connected by construction") {
    const RoadNetwork net = grid_network(4, 6, 7);
    const RoadNetwork reduced = largest_scc(net);
    CHECK(reduced.node_count() == net.node_count());
    CHECK(reduced.edge_count() == net.edge_count());
}

TEST_CASE("grid_network: spacing is about 222 m and speeds come from the set") {
    const std::vector<double> speeds = {42.0};
    const RoadNetwork net = grid_network(3, 3, 11, {}, speeds);
    for (const RoadEdge& e : net.edges()) {
        CHECK(e.speed_kph == 42.0);
        CHECK(e.length_m > 210.0);
        CHECK(e.length_m < 230.0);
    }
}

TEST_CASE("grid_network: opposite directions share one speed draw") {
    const RoadNetwork net = grid_network(6, 6, 13);
    std::map<std::pair<NodeId, NodeId>, double> speed_of;
    for (const RoadEdge& e : net.edges()) {
        speed_of[{e.from_node, e.to_node}] = e.speed_kph;
    }
    for (const RoadEdge& e : net.edges()) {
        CHECK(speed_of.at({e.to_node, e.from_node}) == e.speed_kph);
    }
}

TEST_CASE("grid_network: invalid arguments") {
    ControlProbabilities over;
    over.signal = 0.9;
    over.stop = 0.3;
    CHECK_THROWS_AS(grid_network(3, 3, 1, over), BadProbabilities);
    ControlProbabilities negative;
    negative.crossing = -0.1;
    CHECK_THROWS_AS(grid_network(3, 3, 1, negative), BadProbabilities);
    CHECK_THROWS_AS(grid_network(1, 3, 1), Error);
    const std::vector<double> empty_speeds;
    CHECK_THROWS_AS(grid_network(3, 3, 1, {}, empty_speeds), Error);
}

TEST_CASE("synthetic_truth: degenerate model returns the naive time") {
    DelayModel model;
    model.signal_s = model.stop_s = model.crossing_s = model.give_way_s = model.mini_roundabout_s = 0.0;
    model.left_s = model.slight_left_s = model.right_s = model.slight_right_s = model.uturn_s = 0.0;
    model.gamma = 0.0;
    model.noise_sigma_s = 0.0;
    FeatureVector fv;
    fv.naive_tt_s = 123.0;
    fv.n_signal = 4;
    fv.n_left = 2;
    CHECK(synthetic_truth(fv, model, 1, 0) == 123.0);
}

TEST_CASE("synthetic_truth: hand-computed deterministic example") {
    DelayModel model;  // defaults
    model.noise_sigma_s = 0.0;
    FeatureVector fv;
    fv.naive_tt_s = 100.0;
    fv.n_signal = 2;
    fv.n_left = 1;
    // 100 * 1.1 + 2 * 25 + 10 = 170
    CHECK(synthetic_truth(fv, model, 1, 0) == doctest::Approx(170.0).epsilon(1e-12));
}

TEST_CASE("synthetic_truth: noise is per (seed, pair_id) and reproducible") {
    DelayModel model;
    FeatureVector fv;
    fv.naive_tt_s = 300.0;
    const double a = synthetic_truth(fv, model, 10, 5);
    const double b = synthetic_truth(fv, model, 10, 5);
    CHECK(a == b);
    CHECK(synthetic_truth(fv, model, 10, 6) != a);
    CHECK(synthetic_truth(fv, model, 11, 5) != a);
}

TEST_CASE("synthetic_truth: truncated at one second") {
    DelayModel model;
    model.noise_sigma_s = 10.0;
    FeatureVector fv;
    fv.naive_tt_s = 0.0;  // all mass from noise, often negative
    for (std::int64_t pair = 0; pair < 200; ++pair) {
        CHECK(synthetic_truth(fv, model, 3, pair) >= 1.0);
    }
}

TEST_CASE("synthetic_truth: linear in the feature vector when noiseless") {
    DelayModel model;
    model.noise_sigma_s = 0.0;
    FeatureVector a;
    a.naive_tt_s = 200.0;
    a.n_stop = 3;
    a.n_right = 2;
    FeatureVector b = a;
    b.n_stop = 4;
    const double delta = synthetic_truth(b, model, 1, 1) - synthetic_truth(a, model, 1, 1);
    CHECK(delta == doctest::Approx(model.stop_s).epsilon(1e-12));
}
