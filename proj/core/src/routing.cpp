#include "freeflow/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "freeflow/errors.hpp"
#include "freeflow/rng.hpp"

namespace freeflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dijkstra label ordered lexicographically by (cost, hops) so that among
/// equal-cost paths the fewer-edge one wins.
struct Label {
    double cost = kInf;
    std::uint32_t hops = 0;

    bool better_than(const Label& other) const {
        return cost < other.cost || (cost == other.cost && hops < other.hops);
    }
};

struct Arc {
    std::size_t to = 0;
    double weight = 0.0;
    EdgeId edge_id = 0;
};

struct QueueItem {
    Label label;
    std::size_t node = 0;
};

struct QueueOrder {
    bool operator()(const QueueItem& a, const QueueItem& b) const {
        // std::priority_queue is a max-heap; invert for min ordering.
        return b.label.better_than(a.label);
    }
};

std::vector<Label> dijkstra(const std::vector<std::vector<Arc>>& adjacency, std::size_t source) {
    std::vector<Label> dist(adjacency.size());
    dist[source] = Label{0.0, 0};

    std::priority_queue<QueueItem, std::vector<QueueItem>, QueueOrder> queue;
    queue.push({dist[source], source});
    while (!queue.empty()) {
        const QueueItem top = queue.top();
        queue.pop();
        const Label& settled = dist[top.node];
        if (settled.better_than(top.label)) {
            continue;  // stale entry
        }
        for (const Arc& arc : adjacency[top.node]) {
            const Label candidate{top.label.cost + arc.weight, top.label.hops + 1};
            if (candidate.better_than(dist[arc.to])) {
                dist[arc.to] = candidate;
                queue.push({candidate, arc.to});
            }
        }
    }
    return dist;
}

}  // namespace

Route shortest_path(const RoadNetwork& net, NodeId origin, NodeId destination) {
    const std::size_t src = net.index_of(origin);
    const std::size_t dst = net.index_of(destination);

    if (origin == destination) {
        return Route{{origin}, {}, 0.0, 0.0};
    }

    const std::size_t n = net.node_count();
    std::vector<std::vector<Arc>> forward(n);
    std::vector<std::vector<Arc>> reverse(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const EdgeId eid : net.out_edges_at(i)) {
            const RoadEdge& e = net.edge(eid);
            const std::size_t to = net.index_of(e.to_node);
            forward[i].push_back({to, e.traversal_s, eid});
            reverse[to].push_back({i, e.traversal_s, eid});
        }
    }

    const std::vector<Label> from_origin = dijkstra(forward, src);
    if (from_origin[dst].cost == kInf) {
        throw Unreachable("no path from node " + std::to_string(origin) + " to node " +
                          std::to_string(destination));
    }
    const std::vector<Label> to_destination = dijkstra(reverse, dst);
    const Label total = from_origin[dst];

    // Walk forward along "tight" edges: an edge u->v lies on an optimal
    // (min cost, then min hops) path iff prefix + weight + to_destination[v]
    // reproduces the total label. Hops are compared exactly; cost within a
    // small relative tolerance to absorb summation-order rounding. Taking
    // the smallest tight edge id at each step yields the lexicographically
    // smallest edge-id sequence.
    const double cost_tol = 1e-9 * std::max(1.0, total.cost);

    Route route;
    route.node_seq.push_back(origin);
    std::size_t current = src;
    double acc_cost = 0.0;
    std::uint32_t acc_hops = 0;
    while (current != dst) {
        const Arc* chosen = nullptr;
        for (const Arc& arc : forward[current]) {
            const Label& rest = to_destination[arc.to];
            if (rest.cost == kInf) {
                continue;
            }
            if (acc_hops + 1 + rest.hops != total.hops) {
                continue;
            }
            if (std::abs(acc_cost + arc.weight + rest.cost - total.cost) > cost_tol) {
                continue;
            }
            if (chosen == nullptr || arc.edge_id < chosen->edge_id) {
                chosen = &arc;
            }
        }
        if (chosen == nullptr) {
            // Cannot happen with exact arithmetic; guard against a tolerance
            // anomaly rather than loop forever.
            throw Error("shortest_path: optimal-path reconstruction failed");
        }
        const RoadEdge& e = net.edge(chosen->edge_id);
        route.edge_seq.push_back(chosen->edge_id);
        route.node_seq.push_back(e.to_node);
        route.naive_tt_s += e.traversal_s;
        route.length_m += e.length_m;
        acc_cost += chosen->weight;
        ++acc_hops;
        current = chosen->to;
    }
    return route;
}

std::vector<NodeId> eligible_sampling_nodes(const RoadNetwork& net) {
    const auto nodes = net.nodes();
    std::vector<std::vector<std::size_t>> neighbours(nodes.size());
    for (const RoadEdge& e : net.edges()) {
        if (e.from_node == e.to_node) {
            continue;
        }
        const std::size_t a = net.index_of(e.from_node);
        const std::size_t b = net.index_of(e.to_node);
        neighbours[a].push_back(b);
        neighbours[b].push_back(a);
    }
    std::vector<NodeId> eligible;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& adj = neighbours[i];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        if (adj.size() != 2) {
            eligible.push_back(nodes[i].id);
        }
    }
    return eligible;  // nodes() is sorted by id, so this is too
}

namespace {

std::vector<ODPair> draw_pairs(std::span<const std::pair<NodeId, NodeId>> candidates,
                               std::size_t count, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    std::vector<ODPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::pair<NodeId, NodeId> drawn;
        do {
            drawn = candidates[gen.next_below(candidates.size())];
        } while (drawn.first == drawn.second);
        pairs.push_back(ODPair{static_cast<std::int64_t>(i), drawn.first, drawn.second});
    }
    return pairs;
}

}  // namespace

std::vector<ODPair> sample_od_pairs(const RoadNetwork& net, std::size_t count, std::uint64_t seed) {
    const std::vector<NodeId> eligible = eligible_sampling_nodes(net);
    if (eligible.size() < 2) {
        throw TooFewEligibleNodes("sample_od_pairs: need at least 2 eligible nodes, have " +
                                  std::to_string(eligible.size()));
    }
    rng::SplitMix64 gen(seed);
    std::vector<ODPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        NodeId origin = 0;
        NodeId destination = 0;
        do {
            origin = eligible[gen.next_below(eligible.size())];
            destination = eligible[gen.next_below(eligible.size())];
        } while (origin == destination);
        pairs.push_back(ODPair{static_cast<std::int64_t>(i), origin, destination});
    }
    return pairs;
}

std::vector<ODPair> sample_od_pairs_from(const RoadNetwork& net,
                                         std::span<const std::pair<NodeId, NodeId>> whitelist,
                                         std::size_t count, std::uint64_t seed) {
    if (whitelist.empty()) {
        throw TooFewEligibleNodes("sample_od_pairs_from: whitelist is empty");
    }
    bool any_valid = false;
    for (const auto& [origin, destination] : whitelist) {
        if (!net.has_node(origin)) {
            throw UnknownNode("whitelist references missing node " + std::to_string(origin));
        }
        if (!net.has_node(destination)) {
            throw UnknownNode("whitelist references missing node " + std::to_string(destination));
        }
        any_valid = any_valid || origin != destination;
    }
    if (!any_valid) {
        throw TooFewEligibleNodes("sample_od_pairs_from: whitelist has no origin != destination row");
    }
    return draw_pairs(whitelist, count, seed);
}

}  // namespace freeflow
