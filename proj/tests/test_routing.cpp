#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "freeflow/errors.hpp"
#include "freeflow/routing.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace freeflow;
using freeflow::testing::TestGraph;

namespace {

RoadNetwork triangle_network() {
    // o(0) -> d(2) direct cost 10; o -> m(1) cost 3; m -> d cost 4.
    TestGraph graph;
    graph.n = 3;
    graph.edges = {{0, 2, 10.0}, {0, 1, 3.0}, {1, 2, 4.0}};
    return freeflow::testing::to_road_network(graph);
}

}  // namespace

TEST_CASE("shortest_path: picks the cheaper two-hop route") {
    const RoadNetwork net = triangle_network();
    const Route route = shortest_path(net, 0, 2);
    CHECK(route.node_seq == std::vector<NodeId>{0, 1, 2});
    CHECK(route.naive_tt_s == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(route.edge_seq.size() == 2);
    CHECK(route.length_m == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("shortest_path: origin equals destination") {
    const RoadNetwork net = triangle_network();
    const Route route = shortest_path(net, 1, 1);
    CHECK(route.node_seq == std::vector<NodeId>{1});
    CHECK(route.edge_seq.empty());
    CHECK(route.naive_tt_s == 0.0);
    CHECK(route.length_m == 0.0);
}

TEST_CASE("shortest_path: unreachable on a raw one-way network") {
    TestGraph graph;
    graph.n = 2;
    graph.edges = {{0, 1, 5.0}};
    const RoadNetwork net = freeflow::testing::to_road_network(graph);
    CHECK_THROWS_AS(shortest_path(net, 1, 0), Unreachable);
}

TEST_CASE("shortest_path: unknown nodes are rejected") {
    const RoadNetwork net = triangle_network();
    CHECK_THROWS_AS(shortest_path(net, 0, 77), UnknownNode);
    CHECK_THROWS_AS(shortest_path(net, 77, 0), UnknownNode);
}

TEST_CASE("shortest_path: equal-cost ties prefer fewer edges then smaller edge ids") {
    std::vector<RoadNode> nodes = {
        {0, {0, 0.000}, ControlKind::None},
        {1, {0, 0.001}, ControlKind::None},
        {2, {0, 0.002}, ControlKind::None},
    };
    // Two-hop route 0-1-2 costs 10 like the direct edge; direct must win.
    // Parallel direct edges 7 and 8: the smaller id must win.
    std::vector<RoadEdge> edges = {
        {3, 0, 1, 5.0, 3.6, 0.0},
        {4, 1, 2, 5.0, 3.6, 0.0},
        {8, 0, 2, 10.0, 3.6, 0.0},
        {7, 0, 2, 10.0, 3.6, 0.0},
    };
    const RoadNetwork net = RoadNetwork::create(nodes, edges);
    const Route route = shortest_path(net, 0, 2);
    CHECK(route.node_seq == std::vector<NodeId>{0, 2});
    CHECK(route.edge_seq == std::vector<EdgeId>{7});
    CHECK(route.naive_tt_s == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("shortest_path: matches exhaustive enumeration on random graphs") {
    int queries = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const TestGraph graph =
            freeflow::testing::random_strongly_connected(seed, 8, 16, seed % 2 == 0);
        const RoadNetwork net = freeflow::testing::to_road_network(graph);
        rng::SplitMix64 gen(seed * 31 + 7);
        for (int q = 0; q < 6; ++q) {
            const NodeId origin = static_cast<NodeId>(gen.next_below(graph.n));
            const NodeId destination = static_cast<NodeId>(gen.next_below(graph.n));
            const Route route = shortest_path(net, origin, destination);
            const auto expected = freeflow::testing::enumerate_min_path_cost(
                graph, static_cast<std::size_t>(origin), static_cast<std::size_t>(destination));
            REQUIRE(expected.has_value());
            if (seed % 2 == 0) {
                CHECK(route.naive_tt_s == *expected);  // integer weights: exact
            } else {
                CHECK(std::abs(route.naive_tt_s - *expected) <= 1e-9 * std::max(1.0, *expected));
            }
            ++queries;
        }
    }
    CHECK(queries == 360);
}

TEST_CASE("shortest_path: every prefix of a route is optimal to its last node") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const TestGraph graph = freeflow::testing::random_strongly_connected(seed, 8, 16, false);
        const RoadNetwork net = freeflow::testing::to_road_network(graph);
        const Route route = shortest_path(net, 0, static_cast<NodeId>(graph.n - 1));
        double prefix_cost = 0.0;
        for (std::size_t i = 0; i < route.edge_seq.size(); ++i) {
            prefix_cost += net.edge(route.edge_seq[i]).traversal_s;
            const auto best = freeflow::testing::enumerate_min_path_cost(
                graph, 0, static_cast<std::size_t>(route.node_seq[i + 1]));
            REQUIRE(best.has_value());
            CHECK(prefix_cost <= *best * (1.0 + 1e-9) + 1e-9);
        }
    }
}

TEST_CASE("shortest_path: cost is monotone under an edge-weight increase") {
    TestGraph graph;
    graph.n = 4;
    graph.edges = {{0, 1, 2.0}, {1, 3, 2.0}, {0, 2, 3.0}, {2, 3, 3.0}};
    const RoadNetwork before = freeflow::testing::to_road_network(graph);
    const double base_cost = shortest_path(before, 0, 3).naive_tt_s;

    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        TestGraph bumped = graph;
        bumped.edges[k].weight += 1.5;
        const RoadNetwork after = freeflow::testing::to_road_network(bumped);
        CHECK(shortest_path(after, 0, 3).naive_tt_s >= base_cost - 1e-12);
    }
}

TEST_CASE("eligible_sampling_nodes: chain interiors are excluded") {
    // a - b - c as bidirectional streets: b has undirected degree 2.
    TestGraph graph;
    graph.n = 3;
    graph.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}};
    const RoadNetwork net = freeflow::testing::to_road_network(graph);
    const std::vector<NodeId> eligible = eligible_sampling_nodes(net);
    CHECK(eligible == std::vector<NodeId>{0, 2});
}

TEST_CASE("sample_od_pairs: deterministic and origin != destination") {
    TestGraph graph;
    graph.n = 5;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            if (i != j) {
                graph.edges.push_back({i, j, 1.0});
            }
        }
    }
    const RoadNetwork net = freeflow::testing::to_road_network(graph);

    const std::vector<ODPair> first = sample_od_pairs(net, 5, 99);
    const std::vector<ODPair> second = sample_od_pairs(net, 5, 99);
    REQUIRE(first.size() == 5);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].pair_id == static_cast<std::int64_t>(i));
        CHECK(first[i].origin != first[i].destination);
        CHECK(first[i].origin == second[i].origin);
        CHECK(first[i].destination == second[i].destination);
    }
    const std::vector<ODPair> other_seed = sample_od_pairs(net, 5, 100);
    bool any_difference = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
        any_difference = any_difference || first[i].origin != other_seed[i].origin ||
                         first[i].destination != other_seed[i].destination;
    }
    CHECK(any_difference);
}

TEST_CASE("sample_od_pairs: chain interior nodes are never drawn") {
    TestGraph graph;
    graph.n = 3;
    graph.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}};
    const RoadNetwork net = freeflow::testing::to_road_network(graph);
    for (const ODPair& pair : sample_od_pairs(net, 50, 3)) {
        CHECK(pair.origin != 1);
        CHECK(pair.destination != 1);
    }
}

TEST_CASE("sample_od_pairs: too few eligible nodes") {
    TestGraph graph;
    graph.n = 2;
    graph.edges = {{0, 1, 1.0}, {1, 0, 1.0}};
    const RoadNetwork net = freeflow::testing::to_road_network(graph);
    CHECK_NOTHROW(sample_od_pairs(net, 3, 1));

    // A 3-cycle of bidirectional streets leaves every node at degree 2.
    TestGraph ring;
    ring.n = 3;
    ring.edges = {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}, {2, 0, 1}, {0, 2, 1}};
    const RoadNetwork ring_net = freeflow::testing::to_road_network(ring);
    CHECK_THROWS_AS(sample_od_pairs(ring_net, 3, 1), TooFewEligibleNodes);
}

TEST_CASE("sample_od_pairs_from: draws only whitelisted rows") {
    const RoadNetwork net = triangle_network();
    const std::vector<std::pair<NodeId, NodeId>> whitelist = {{0, 2}, {1, 2}};
    const auto pairs = sample_od_pairs_from(net, whitelist, 10, 5);
    REQUIRE(pairs.size() == 10);
    for (const ODPair& p : pairs) {
        const bool listed = (p.origin == 0 && p.destination == 2) || (p.origin == 1 && p.destination == 2);
        CHECK(listed);
    }
    const std::vector<std::pair<NodeId, NodeId>> bad = {{0, 99}};
    CHECK_THROWS_AS(sample_od_pairs_from(net, bad, 1, 5), UnknownNode);
}
