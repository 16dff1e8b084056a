#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "freeflow/network.hpp"

namespace freeflow {

/// A traversal-time shortest path. naive_tt_s is the sum of edge traversal
/// times along edge_seq; length_m the sum of edge lengths.
struct Route {
    std::vector<NodeId> node_seq;  // >= 1 nodes
    std::vector<EdgeId> edge_seq;  // |node_seq| - 1 edges
    double naive_tt_s = 0.0;
    double length_m = 0.0;
};

struct ODPair {
    std::int64_t pair_id = 0;
    NodeId origin = 0;
    NodeId destination = 0;
};

/// Minimal-traversal-time route from origin to destination.
/// Among equal-cost paths the route with fewer edges wins, then the
/// lexicographically smallest edge-id sequence. origin == destination
/// yields the trivial single-node route. Throws UnknownNode / Unreachable.
Route shortest_path(const RoadNetwork& net, NodeId origin, NodeId destination);

/// Nodes eligible for OD sampling: undirected street degree != 2, where the
/// degree counts distinct neighbours over both edge directions (self-loops
/// ignored). Sorted by node id.
std::vector<NodeId> eligible_sampling_nodes(const RoadNetwork& net);

/// count OD pairs drawn uniformly with replacement from the eligible nodes,
/// redrawing whenever origin == destination. Fully determined by seed;
/// pair_id runs 0..count-1. Throws TooFewEligibleNodes.
std::vector<ODPair> sample_od_pairs(const RoadNetwork& net, std::size_t count, std::uint64_t seed);

/// Same contract, but pairs are drawn uniformly with replacement from an
/// externally supplied whitelist of (origin, destination) rows instead of
/// the eligibility rule. Every listed node must exist in the network.
std::vector<ODPair> sample_od_pairs_from(const RoadNetwork& net,
                                         std::span<const std::pair<NodeId, NodeId>> whitelist,
                                         std::size_t count, std::uint64_t seed);

}  // namespace freeflow
