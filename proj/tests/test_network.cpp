#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "freeflow/errors.hpp"
#include "freeflow/network.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace freeflow;
using freeflow::testing::TestGraph;

TEST_CASE("parse_maxspeed: bare numbers are km/h") {
    CHECK(parse_maxspeed("50") == 50.0);
    CHECK(parse_maxspeed("  30 ") == 30.0);
    CHECK(parse_maxspeed("12.5") == 12.5);
}

TEST_CASE("parse_maxspeed: mph suffix converts") {
    CHECK(parse_maxspeed("40 mph") == doctest::Approx(64.37376).epsilon(1e-12));
    CHECK(parse_maxspeed("40mph") == doctest::Approx(64.37376).epsilon(1e-12));
    CHECK(parse_maxspeed(" 25 mph ") == doctest::Approx(25 * 1.609344).epsilon(1e-12));
}

TEST_CASE("parse_maxspeed: anything else is unparsable") {
    CHECK(parse_maxspeed("walk") == std::nullopt);
    CHECK(parse_maxspeed("") == std::nullopt);
    CHECK(parse_maxspeed("none") == std::nullopt);
    CHECK(parse_maxspeed("50 km/h") == std::nullopt);
    CHECK(parse_maxspeed("-30") == std::nullopt);
    CHECK(parse_maxspeed("0") == std::nullopt);
    CHECK(parse_maxspeed("mph") == std::nullopt);
}

TEST_CASE("edge_traversal_time_s: arithmetic and rejection") {
    CHECK(edge_traversal_time_s(1000.0, 36.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(edge_traversal_time_s(500.0, 50.0) == doctest::Approx(36.0).epsilon(1e-12));
    CHECK_THROWS_AS(edge_traversal_time_s(0.0, 50.0), NonPositiveInput);
    CHECK_THROWS_AS(edge_traversal_time_s(100.0, 0.0), NonPositiveInput);
    CHECK_THROWS_AS(edge_traversal_time_s(-5.0, 50.0), NonPositiveInput);
}

TEST_CASE("speed table: defaults and fallback") {
    const SpeedTable table;
    CHECK(table.lookup("motorway") == 100.0);
    CHECK(table.lookup("residential") == 30.0);
    CHECK(table.lookup("living_street") == 10.0);
    CHECK(table.lookup("bridleway") == 40.0);  // unknown class
    CHECK(table.lookup("motorway_link") == 40.0);  // only exact classes are listed
}

TEST_CASE("RoadNetwork::create: derives traversal times and adjacency") {
    std::vector<RoadNode> nodes = {
        {1, {0.0, 0.0}, ControlKind::None},
        {2, {0.0, 0.01}, ControlKind::Signal},
    };
    std::vector<RoadEdge> edges = {
        {10, 1, 2, 500.0, 50.0, 0.0},
        {11, 2, 1, 500.0, 50.0, 0.0},
    };
    const RoadNetwork net = RoadNetwork::create(nodes, edges);
    CHECK(net.node_count() == 2);
    CHECK(net.edge_count() == 2);
    CHECK(net.edge(10).traversal_s == doctest::Approx(36.0).epsilon(1e-12));
    CHECK(net.out_edges(1).size() == 1);
    CHECK(net.out_edges(1)[0] == 10);
    CHECK(net.node(2).control == ControlKind::Signal);
    CHECK_THROWS_AS(net.node(99), UnknownNode);
}

TEST_CASE("RoadNetwork::create: every edge satisfies the traversal invariant") {
    rng::SplitMix64 gen(41);
    std::vector<RoadNode> nodes;
    for (NodeId id = 0; id < 20; ++id) {
        nodes.push_back({id, {gen.next_double(), gen.next_double()}, ControlKind::None});
    }
    std::vector<RoadEdge> edges;
    for (EdgeId id = 0; id < 60; ++id) {
        const NodeId a = static_cast<NodeId>(gen.next_below(20));
        const NodeId b = static_cast<NodeId>(gen.next_below(20));
        edges.push_back({id, a, b, 1.0 + 1000.0 * gen.next_double(), 5.0 + 95.0 * gen.next_double(), 0.0});
    }
    const RoadNetwork net = RoadNetwork::create(nodes, edges);
    for (const RoadEdge& e : net.edges()) {
        const double expected = e.length_m / (e.speed_kph / 3.6);
        CHECK(std::abs(e.traversal_s - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("RoadNetwork::create: rejects duplicates and dangling endpoints") {
    CHECK_THROWS_AS(RoadNetwork::create({{1, {0, 0}, ControlKind::None}, {1, {0, 1}, ControlKind::None}}, {}),
                    DuplicateId);
    CHECK_THROWS_AS(RoadNetwork::create({{1, {0, 0}, ControlKind::None}},
                                        {{5, 1, 2, 100.0, 50.0, 0.0}}),
                    UnknownNode);
}

namespace {

RoadNetwork cycle_network(std::initializer_list<NodeId> ids) {
    std::vector<RoadNode> nodes;
    double lon = 0.0;
    for (const NodeId id : ids) {
        nodes.push_back({id, {0.0, lon += 0.001}, ControlKind::None});
    }
    std::vector<RoadEdge> edges;
    EdgeId eid = 0;
    const std::vector<NodeId> order(ids);
    for (std::size_t i = 0; i < order.size(); ++i) {
        edges.push_back({eid++, order[i], order[(i + 1) % order.size()], 100.0, 50.0, 0.0});
    }
    return RoadNetwork::create(std::move(nodes), std::move(edges));
}

}  // namespace

TEST_CASE("largest_scc: a directed cycle is already strongly connected") {
    const RoadNetwork net = cycle_network({1, 2, 3});
    const RoadNetwork reduced = largest_scc(net);
    CHECK(reduced.node_count() == 3);
    CHECK(reduced.edge_count() == 3);
    for (const RoadNode& n : net.nodes()) {
        CHECK(reduced.has_node(n.id));
    }
}

TEST_CASE("largest_scc: a chain collapses to the smallest node id") {
    std::vector<RoadNode> nodes = {
        {7, {0, 0.000}, ControlKind::None},
        {8, {0, 0.001}, ControlKind::None},
        {9, {0, 0.002}, ControlKind::None},
    };
    std::vector<RoadEdge> edges = {
        {0, 7, 8, 100.0, 50.0, 0.0},
        {1, 8, 9, 100.0, 50.0, 0.0},
    };
    const RoadNetwork reduced = largest_scc(RoadNetwork::create(nodes, edges));
    CHECK(reduced.node_count() == 1);
    CHECK(reduced.edge_count() == 0);
    CHECK(reduced.has_node(7));
}

TEST_CASE("largest_scc: two disjoint 2-cycles tie-break on min node id") {
    std::vector<RoadNode> nodes = {
        {1, {0, 0.000}, ControlKind::None},
        {2, {0, 0.001}, ControlKind::None},
        {3, {0, 0.002}, ControlKind::None},
        {4, {0, 0.003}, ControlKind::None},
    };
    std::vector<RoadEdge> edges = {
        {0, 1, 2, 100.0, 50.0, 0.0},
        {1, 2, 1, 100.0, 50.0, 0.0},
        {2, 3, 4, 100.0, 50.0, 0.0},
        {3, 4, 3, 100.0, 50.0, 0.0},
    };
    const RoadNetwork reduced = largest_scc(RoadNetwork::create(nodes, edges));
    CHECK(reduced.node_count() == 2);
    CHECK(reduced.has_node(1));
    CHECK(reduced.has_node(2));
    CHECK_FALSE(reduced.has_node(3));
}

TEST_CASE("largest_scc: rejects the empty network") {
    CHECK_THROWS_AS(largest_scc(RoadNetwork::create({}, {})), EmptyNetwork);
}

TEST_CASE("largest_scc: idempotent") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TestGraph graph = freeflow::testing::random_digraph(seed, 10);
        const RoadNetwork net = freeflow::testing::to_road_network(graph);
        if (net.node_count() == 0) {
            continue;
        }
        const RoadNetwork once = largest_scc(net);
        const RoadNetwork twice = largest_scc(once);
        CHECK(once.node_count() == twice.node_count());
        CHECK(once.edge_count() == twice.edge_count());
        for (const RoadNode& n : once.nodes()) {
            CHECK(twice.has_node(n.id));
        }
    }
}

TEST_CASE("largest_scc: matches brute-force reachability on random digraphs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const TestGraph graph = freeflow::testing::random_digraph(seed, 10);
        const std::vector<std::size_t> expected_nodes = freeflow::testing::reachability_largest_scc(graph);
        const RoadNetwork net = freeflow::testing::to_road_network(graph);
        const RoadNetwork reduced = largest_scc(net);

        REQUIRE(reduced.node_count() == expected_nodes.size());
        for (const std::size_t node : expected_nodes) {
            CHECK(reduced.has_node(static_cast<NodeId>(node)));
        }
        // Edge set must be the full induced multiset.
        std::size_t expected_edges = 0;
        const std::set<std::size_t> members(expected_nodes.begin(), expected_nodes.end());
        for (const TestGraph::Edge& e : graph.edges) {
            if (members.contains(e.from) && members.contains(e.to)) {
                ++expected_edges;
            }
        }
        CHECK(reduced.edge_count() == expected_edges);
    }
}
