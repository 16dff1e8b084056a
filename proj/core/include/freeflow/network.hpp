#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "freeflow/geo.hpp"

namespace freeflow {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

/// Traffic control element tagged on a node. Exactly one kind per node.
enum class ControlKind {
    None = 0,
    Signal,
    Stop,
    Crossing,
    GiveWay,
    MiniRoundabout,
};

/// Number of countable control kinds (None excluded).
inline constexpr std::size_t kControlKindCount = 5;

std::string_view to_string(ControlKind kind);
std::optional<ControlKind> control_kind_from_string(std::string_view name);

struct RoadNode {
    NodeId id = 0;
    GeoPoint point;
    ControlKind control = ControlKind::None;
};

struct RoadEdge {
    EdgeId edge_id = 0;
    NodeId from_node = 0;
    NodeId to_node = 0;
    double length_m = 0.0;
    double speed_kph = 0.0;
    double traversal_s = 0.0;  // always length_m / (speed_kph / 3.6)
};

/// Seconds to cover length_m at a constant speed_kph.
/// Throws NonPositiveInput unless both arguments are > 0.
double edge_traversal_time_s(double length_m, double speed_kph);

/// Parse an OSM maxspeed value: a bare number is km/h, a number with an
/// "mph" suffix is converted (x 1.609344), surrounding whitespace is
/// ignored. Anything else yields nullopt so the caller can fall back to a
/// class default.
std::optional<double> parse_maxspeed(std::string_view raw);

/// Fallback speeds keyed by highway class, applied when a way carries no
/// usable maxspeed tag. Lookup is by exact class string; unknown classes
/// get default_kph.
class SpeedTable {
public:
    /// Built-in defaults: motorway 100, trunk 90, primary 65, secondary 55,
    /// tertiary 50, unclassified 40, residential 30, living_street 10,
    /// service 20; anything else 40.
    SpeedTable();

    SpeedTable(std::unordered_map<std::string, double> entries_kph, double default_kph);

    double lookup(std::string_view highway_class) const;
    double default_kph() const noexcept { return default_kph_; }
    const std::unordered_map<std::string, double>& entries() const noexcept { return entries_; }

private:
    std::unordered_map<std::string, double> entries_;
    double default_kph_ = 40.0;
};

/// Immutable directed multigraph of geo-located nodes and speed-attributed
/// edges. Parallel edges and self-loops are permitted. Nodes and edges are
/// kept sorted by id; per-node outgoing edge lists are sorted by edge id.
/// Safe to share across concurrent readers once built.
class RoadNetwork {
public:
    /// Validates ids are unique, endpoints exist, lengths/speeds are
    /// positive, and derives traversal_s for every edge.
    static RoadNetwork create(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

    std::span<const RoadNode> nodes() const noexcept { return nodes_; }
    std::span<const RoadEdge> edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool has_node(NodeId id) const noexcept { return node_index_.contains(id); }
    bool has_edge(EdgeId id) const noexcept { return edge_index_.contains(id); }

    /// Throws UnknownNode / Error when the id is absent.
    const RoadNode& node(NodeId id) const;
    const RoadEdge& edge(EdgeId id) const;

    /// Dense position of a node in nodes(); throws UnknownNode.
    std::size_t index_of(NodeId id) const;

    /// Outgoing edge ids of a node, sorted ascending.
    std::span<const EdgeId> out_edges(NodeId id) const;
    std::span<const EdgeId> out_edges_at(std::size_t node_pos) const noexcept {
        return adjacency_[node_pos];
    }

private:
    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;  // aligned with nodes_
    std::unordered_map<NodeId, std::size_t> node_index_;
    std::unordered_map<EdgeId, std::size_t> edge_index_;
};

/// Induced sub-network on the largest strongly connected component.
/// Ties are broken by more nodes, then more edges, then smallest minimum
/// node id; node and edge ids are preserved. Throws EmptyNetwork.
RoadNetwork largest_scc(const RoadNetwork& net);

}  // namespace freeflow
