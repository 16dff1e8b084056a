#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "freeflow/network.hpp"

namespace freeflow {

struct RawNode {
    std::int64_t id = 0;
    double lat = 0.0;
    double lon = 0.0;
    std::unordered_map<std::string, std::string> tags;
};

struct RawWay {
    std::int64_t id = 0;
    std::vector<std::int64_t> node_refs;  // ordered, >= 2
    std::unordered_map<std::string, std::string> tags;
};

struct OsmData {
    std::vector<RawNode> nodes;
    std::vector<RawWay> ways;
};

/// Parse the OSM XML subset: root <osm>, child <node>/<way> elements,
/// <tag k v> and <nd ref> children. Unknown elements are ignored.
/// Throws MalformedXml (with line/column) or DuplicateId.
OsmData parse_osm_xml(std::string_view xml);
OsmData parse_osm_xml(std::istream& in);

/// Highway classes considered drivable by car. A way passes the filter when
/// its highway tag equals one of these or one of their "_link" variants.
std::span<const std::string_view> default_drivable_classes();

bool is_drivable_highway(std::string_view highway_value,
                         std::span<const std::string_view> base_classes = default_drivable_classes());

/// Assemble a routable RoadNetwork from parsed OSM data:
/// keep drivable ways, expand consecutive node pairs into directed edges
/// honoring oneway tags, measure lengths by haversine, resolve speeds via
/// parse_maxspeed with fallback_speeds as backstop, map node controls, and
/// finally reduce to the largest strongly connected component.
/// Throws DanglingNodeRef or EmptyNetwork.
RoadNetwork build_network(const std::vector<RawNode>& nodes, const std::vector<RawWay>& ways,
                          const SpeedTable& fallback_speeds,
                          std::span<const std::string_view> drivable = default_drivable_classes());

}  // namespace freeflow
