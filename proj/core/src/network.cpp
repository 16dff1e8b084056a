#include "freeflow/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "freeflow/errors.hpp"

namespace freeflow {

std::string_view to_string(ControlKind kind) {
    switch (kind) {
        case ControlKind::None: return "none";
        case ControlKind::Signal: return "signal";
        case ControlKind::Stop: return "stop";
        case ControlKind::Crossing: return "crossing";
        case ControlKind::GiveWay: return "give_way";
        case ControlKind::MiniRoundabout: return "mini_roundabout";
    }
    return "none";
}

std::optional<ControlKind> control_kind_from_string(std::string_view name) {
    if (name == "none") return ControlKind::None;
    if (name == "signal") return ControlKind::Signal;
    if (name == "stop") return ControlKind::Stop;
    if (name == "crossing") return ControlKind::Crossing;
    if (name == "give_way") return ControlKind::GiveWay;
    if (name == "mini_roundabout") return ControlKind::MiniRoundabout;
    return std::nullopt;
}

double edge_traversal_time_s(double length_m, double speed_kph) {
    if (!(length_m > 0.0) || !(speed_kph > 0.0)) {
        throw NonPositiveInput("edge_traversal_time_s: length and speed must be > 0");
    }
    return length_m / (speed_kph / 3.6);
}

namespace {

constexpr double kMphToKph = 1.609344;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::optional<double> parse_maxspeed(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [rest, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || !(value > 0.0) || !std::isfinite(value)) {
        return std::nullopt;
    }
    std::string_view suffix = trim(std::string_view(rest, static_cast<std::size_t>(s.data() + s.size() - rest)));
    if (suffix.empty()) {
        return value;
    }
    if (suffix == "mph") {
        return value * kMphToKph;
    }
    return std::nullopt;
}

SpeedTable::SpeedTable()
    : entries_{
          {"motorway", 100.0}, {"trunk", 90.0},        {"primary", 65.0},
          {"secondary", 55.0}, {"tertiary", 50.0},     {"unclassified", 40.0},
          {"residential", 30.0}, {"living_street", 10.0}, {"service", 20.0},
      } {}

SpeedTable::SpeedTable(std::unordered_map<std::string, double> entries_kph, double default_kph)
    : entries_(std::move(entries_kph)), default_kph_(default_kph) {
    for (const auto& [cls, kph] : entries_) {
        if (!(kph > 0.0)) {
            throw NonPositiveInput("speed table: class '" + cls + "' has non-positive speed");
        }
    }
    if (!(default_kph_ > 0.0)) {
        throw NonPositiveInput("speed table: default speed must be > 0");
    }
}

double SpeedTable::lookup(std::string_view highway_class) const {
    const auto it = entries_.find(std::string(highway_class));
    return it != entries_.end() ? it->second : default_kph_;
}

RoadNetwork RoadNetwork::create(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges) {
    RoadNetwork net;
    std::sort(nodes.begin(), nodes.end(), [](const RoadNode& a, const RoadNode& b) { return a.id < b.id; });
    std::sort(edges.begin(), edges.end(),
              [](const RoadEdge& a, const RoadEdge& b) { return a.edge_id < b.edge_id; });

    net.node_index_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!net.node_index_.emplace(nodes[i].id, i).second) {
            throw DuplicateId("duplicate node id " + std::to_string(nodes[i].id));
        }
    }
    net.edge_index_.reserve(edges.size());
    net.adjacency_.assign(nodes.size(), {});
    for (std::size_t i = 0; i < edges.size(); ++i) {
        RoadEdge& e = edges[i];
        if (!net.edge_index_.emplace(e.edge_id, i).second) {
            throw DuplicateId("duplicate edge id " + std::to_string(e.edge_id));
        }
        const auto from_it = net.node_index_.find(e.from_node);
        if (from_it == net.node_index_.end()) {
            throw UnknownNode("edge " + std::to_string(e.edge_id) + " references missing node " +
                              std::to_string(e.from_node));
        }
        if (!net.node_index_.contains(e.to_node)) {
            throw UnknownNode("edge " + std::to_string(e.edge_id) + " references missing node " +
                              std::to_string(e.to_node));
        }
        e.traversal_s = edge_traversal_time_s(e.length_m, e.speed_kph);
        net.adjacency_[from_it->second].push_back(e.edge_id);
    }
    for (auto& out : net.adjacency_) {
        std::sort(out.begin(), out.end());
    }
    net.nodes_ = std::move(nodes);
    net.edges_ = std::move(edges);
    return net;
}

const RoadNode& RoadNetwork::node(NodeId id) const {
    const auto it = node_index_.find(id);
    if (it == node_index_.end()) {
        throw UnknownNode("unknown node id " + std::to_string(id));
    }
    return nodes_[it->second];
}

const RoadEdge& RoadNetwork::edge(EdgeId id) const {
    const auto it = edge_index_.find(id);
    if (it == edge_index_.end()) {
        throw Error("unknown edge id " + std::to_string(id));
    }
    return edges_[it->second];
}

std::size_t RoadNetwork::index_of(NodeId id) const {
    const auto it = node_index_.find(id);
    if (it == node_index_.end()) {
        throw UnknownNode("unknown node id " + std::to_string(id));
    }
    return it->second;
}

std::span<const EdgeId> RoadNetwork::out_edges(NodeId id) const {
    return adjacency_[index_of(id)];
}

namespace {

/// Iterative Tarjan. Returns component index per node position; component
/// indices are assigned in order of completion.
std::vector<int> tarjan_components(const RoadNetwork& net, int& component_count) {
    const std::size_t n = net.node_count();
    constexpr int kUnvisited = -1;

    std::vector<int> index(n, kUnvisited);
    std::vector<int> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<int> component(n, -1);
    int next_index = 0;
    component_count = 0;

    struct Frame {
        std::size_t node;
        std::size_t edge_pos;  // next out-edge to consider
    };
    std::vector<Frame> call_stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) {
            continue;
        }
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            const auto out = net.out_edges_at(frame.node);
            if (frame.edge_pos < out.size()) {
                const RoadEdge& e = net.edge(out[frame.edge_pos++]);
                const std::size_t succ = net.index_of(e.to_node);
                if (index[succ] == kUnvisited) {
                    index[succ] = lowlink[succ] = next_index++;
                    stack.push_back(succ);
                    on_stack[succ] = true;
                    call_stack.push_back({succ, 0});
                } else if (on_stack[succ]) {
                    lowlink[frame.node] = std::min(lowlink[frame.node], index[succ]);
                }
            } else {
                const std::size_t v = frame.node;
                call_stack.pop_back();
                if (!call_stack.empty()) {
                    const std::size_t parent = call_stack.back().node;
                    lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
                }
                if (lowlink[v] == index[v]) {
                    while (true) {
                        const std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        component[w] = component_count;
                        if (w == v) {
                            break;
                        }
                    }
                    ++component_count;
                }
            }
        }
    }
    return component;
}

}  // namespace

RoadNetwork largest_scc(const RoadNetwork& net) {
    if (net.node_count() == 0) {
        throw EmptyNetwork("largest_scc: network has no nodes");
    }

    int component_count = 0;
    const std::vector<int> component = tarjan_components(net, component_count);

    struct CompStats {
        std::size_t node_count = 0;
        std::size_t edge_count = 0;
        NodeId min_node_id = std::numeric_limits<NodeId>::max();
    };
    std::vector<CompStats> stats(component_count);

    const auto nodes = net.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CompStats& s = stats[component[i]];
        ++s.node_count;
        s.min_node_id = std::min(s.min_node_id, nodes[i].id);
    }
    for (const RoadEdge& e : net.edges()) {
        const int cf = component[net.index_of(e.from_node)];
        const int ct = component[net.index_of(e.to_node)];
        if (cf == ct) {
            ++stats[cf].edge_count;
        }
    }

    int best = 0;
    for (int c = 1; c < component_count; ++c) {
        const CompStats& a = stats[c];
        const CompStats& b = stats[best];
        if (a.node_count > b.node_count ||
            (a.node_count == b.node_count && a.edge_count > b.edge_count) ||
            (a.node_count == b.node_count && a.edge_count == b.edge_count &&
             a.min_node_id < b.min_node_id)) {
            best = c;
        }
    }

    std::vector<RoadNode> kept_nodes;
    kept_nodes.reserve(stats[best].node_count);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (component[i] == best) {
            kept_nodes.push_back(nodes[i]);
        }
    }
    std::vector<RoadEdge> kept_edges;
    kept_edges.reserve(stats[best].edge_count);
    for (const RoadEdge& e : net.edges()) {
        if (component[net.index_of(e.from_node)] == best &&
            component[net.index_of(e.to_node)] == best) {
            kept_edges.push_back(e);
        }
    }
    return RoadNetwork::create(std::move(kept_nodes), std::move(kept_edges));
}

}  // namespace freeflow
