#include "freeflow/osm.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "freeflow/errors.hpp"
#include "freeflow/geo.hpp"

namespace freeflow {

namespace {

bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

struct Attribute {
    std::string name;
    std::string value;
};

struct Element {
    std::string name;
    std::vector<Attribute> attributes;
    bool self_closing = false;

    const std::string* attr(std::string_view name_) const {
        for (const Attribute& a : attributes) {
            if (a.name == name_) {
                return &a.value;
            }
        }
        return nullptr;
    }
};

/// Minimal single-pass XML reader covering the subset OSM dumps use:
/// declaration, comments, CDATA, elements with double- or single-quoted
/// attributes, character data (skipped), and the five predefined entities
/// plus numeric character references.
class XmlReader {
public:
    explicit XmlReader(std::string_view text) : text_(text) {}

    /// Advance to the next start tag or end tag. Returns false at end of input.
    /// open receives start tags; for end tags only the name is set and
    /// is_end_tag() is true for the last event.
    bool next(Element& element, bool& is_end_tag) {
        while (true) {
            skip_char_data();
            if (at_end()) {
                return false;
            }
            // pos_ is now at '<'
            if (starts_with("<!--")) {
                skip_comment();
                continue;
            }
            if (starts_with("<![CDATA[")) {
                skip_until("]]>", "unterminated CDATA section");
                continue;
            }
            if (starts_with("<!")) {
                skip_until(">", "unterminated markup declaration");
                continue;
            }
            if (starts_with("<?")) {
                skip_until("?>", "unterminated processing instruction");
                continue;
            }
            if (starts_with("</")) {
                advance(2);
                element = Element{};
                element.name = read_name("end tag name expected");
                skip_space();
                expect('>', "expected '>' to close end tag");
                is_end_tag = true;
                return true;
            }
            expect('<', "expected '<'");
            element = Element{};
            element.name = read_name("start tag name expected");
            read_attributes(element);
            is_end_tag = false;
            return true;
        }
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw MalformedXml(line_, column_, message);
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    bool starts_with(std::string_view s) const {
        return text_.substr(pos_).starts_with(s);
    }

    void advance(std::size_t count = 1) {
        for (std::size_t i = 0; i < count && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void expect(char c, const char* message) {
        if (at_end() || peek() != c) {
            fail(message);
        }
        advance();
    }

    void skip_space() {
        while (!at_end() && is_space(peek())) {
            advance();
        }
    }

    void skip_char_data() {
        while (!at_end() && peek() != '<') {
            advance();
        }
    }

    void skip_comment() {
        advance(4);  // "<!--"
        while (!at_end()) {
            if (starts_with("-->")) {
                advance(3);
                return;
            }
            advance();
        }
        fail("unterminated comment");
    }

    void skip_until(std::string_view terminator, const char* message) {
        while (!at_end()) {
            if (starts_with(terminator)) {
                advance(terminator.size());
                return;
            }
            advance();
        }
        fail(message);
    }

    std::string read_name(const char* message) {
        if (at_end() || !is_name_start(peek())) {
            fail(message);
        }
        std::string name;
        while (!at_end() && is_name_char(peek())) {
            name.push_back(peek());
            advance();
        }
        return name;
    }

    void read_attributes(Element& element) {
        while (true) {
            skip_space();
            if (at_end()) {
                fail("unterminated start tag");
            }
            if (peek() == '/') {
                advance();
                expect('>', "expected '>' after '/'");
                element.self_closing = true;
                return;
            }
            if (peek() == '>') {
                advance();
                return;
            }
            Attribute attr;
            attr.name = read_name("attribute name expected");
            skip_space();
            expect('=', "expected '=' after attribute name");
            skip_space();
            if (at_end() || (peek() != '"' && peek() != '\'')) {
                fail("attribute value must be quoted");
            }
            const char quote = peek();
            advance();
            while (!at_end() && peek() != quote) {
                if (peek() == '<') {
                    fail("'<' not allowed in attribute value");
                }
                if (peek() == '&') {
                    attr.value += read_entity();
                } else {
                    attr.value.push_back(peek());
                    advance();
                }
            }
            expect(quote, "unterminated attribute value");
            for (const Attribute& existing : element.attributes) {
                if (existing.name == attr.name) {
                    fail("duplicate attribute '" + attr.name + "'");
                }
            }
            element.attributes.push_back(std::move(attr));
        }
    }

    std::string read_entity() {
        advance();  // '&'
        std::string entity;
        while (!at_end() && peek() != ';') {
            entity.push_back(peek());
            advance();
            if (entity.size() > 10) {
                fail("entity reference too long");
            }
        }
        expect(';', "unterminated entity reference");
        if (entity == "amp") return "&";
        if (entity == "lt") return "<";
        if (entity == "gt") return ">";
        if (entity == "quot") return "\"";
        if (entity == "apos") return "'";
        if (!entity.empty() && entity[0] == '#') {
            unsigned long code = 0;
            const bool hex = entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X');
            const std::string digits = entity.substr(hex ? 2 : 1);
            const auto [p, ec] =
                std::from_chars(digits.data(), digits.data() + digits.size(), code, hex ? 16 : 10);
            if (ec != std::errc{} || p != digits.data() + digits.size() || code == 0 || code > 0x10FFFF) {
                fail("bad character reference '&" + entity + ";'");
            }
            // UTF-8 encode.
            std::string out;
            if (code < 0x80) {
                out.push_back(static_cast<char>(code));
            } else if (code < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else if (code < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (code >> 18)));
                out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            }
            return out;
        }
        fail("unknown entity '&" + entity + ";'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

std::int64_t parse_int_attr(XmlReader& reader, const Element& element, std::string_view name) {
    const std::string* raw = element.attr(name);
    if (raw == nullptr) {
        reader.fail("<" + element.name + "> missing required attribute '" + std::string(name) + "'");
    }
    std::int64_t value = 0;
    const auto [p, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
    if (ec != std::errc{} || p != raw->data() + raw->size()) {
        reader.fail("<" + element.name + "> attribute '" + std::string(name) + "' is not an integer");
    }
    return value;
}

double parse_double_attr(XmlReader& reader, const Element& element, std::string_view name) {
    const std::string* raw = element.attr(name);
    if (raw == nullptr) {
        reader.fail("<" + element.name + "> missing required attribute '" + std::string(name) + "'");
    }
    double value = 0.0;
    const auto [p, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
    if (ec != std::errc{} || p != raw->data() + raw->size()) {
        reader.fail("<" + element.name + "> attribute '" + std::string(name) + "' is not a number");
    }
    return value;
}

}  // namespace

OsmData parse_osm_xml(std::string_view xml) {
    XmlReader reader(xml);
    OsmData data;
    std::unordered_set<std::int64_t> node_ids;
    std::unordered_set<std::int64_t> way_ids;

    std::vector<std::string> open;   // element stack
    RawNode* current_node = nullptr;  // open <node>, depth 2
    RawWay* current_way = nullptr;    // open <way>, depth 2
    std::vector<std::pair<std::size_t, std::size_t>> way_positions;

    Element element;
    bool is_end_tag = false;
    bool saw_root = false;

    while (reader.next(element, is_end_tag)) {
        if (is_end_tag) {
            if (open.empty() || open.back() != element.name) {
                reader.fail("mismatched end tag </" + element.name + ">");
            }
            if (open.size() == 2) {
                current_node = nullptr;
                current_way = nullptr;
            }
            open.pop_back();
            continue;
        }

        if (open.empty()) {
            if (saw_root) {
                reader.fail("content after root element");
            }
            if (element.name != "osm") {
                reader.fail("root element must be <osm>, found <" + element.name + ">");
            }
            saw_root = true;
        }

        const std::size_t depth = open.size();
        if (depth == 1) {
            if (element.name == "node") {
                RawNode node;
                node.id = parse_int_attr(reader, element, "id");
                node.lat = parse_double_attr(reader, element, "lat");
                node.lon = parse_double_attr(reader, element, "lon");
                if (!node_ids.insert(node.id).second) {
                    throw DuplicateId("duplicate node id " + std::to_string(node.id));
                }
                data.nodes.push_back(std::move(node));
                if (!element.self_closing) {
                    current_node = &data.nodes.back();
                }
            } else if (element.name == "way") {
                RawWay way;
                way.id = parse_int_attr(reader, element, "id");
                if (!way_ids.insert(way.id).second) {
                    throw DuplicateId("duplicate way id " + std::to_string(way.id));
                }
                if (element.self_closing) {
                    reader.fail("<way> must contain at least two <nd> references");
                }
                data.ways.push_back(std::move(way));
                way_positions.emplace_back(reader.line(), reader.column());
                current_way = &data.ways.back();
            }
        } else if (depth == 2) {
            if (element.name == "tag" && (current_node != nullptr || current_way != nullptr)) {
                const std::string* k = element.attr("k");
                const std::string* v = element.attr("v");
                if (k == nullptr || v == nullptr) {
                    reader.fail("<tag> requires both 'k' and 'v' attributes");
                }
                auto& tags = current_node != nullptr ? current_node->tags : current_way->tags;
                tags[*k] = *v;  // last value wins for repeated keys
            } else if (element.name == "nd" && current_way != nullptr) {
                current_way->node_refs.push_back(parse_int_attr(reader, element, "ref"));
            }
        }
        // Unknown elements (and anything nested deeper) are ignored.

        if (!element.self_closing) {
            open.push_back(element.name);
        }
    }

    if (!open.empty()) {
        reader.fail("unterminated element <" + open.back() + ">");
    }
    if (!saw_root) {
        reader.fail("document has no root element");
    }
    for (std::size_t i = 0; i < data.ways.size(); ++i) {
        if (data.ways[i].node_refs.size() < 2) {
            throw MalformedXml(way_positions[i].first, way_positions[i].second,
                               "way " + std::to_string(data.ways[i].id) +
                                   " has fewer than two <nd> references");
        }
    }
    return data;
}

OsmData parse_osm_xml(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    return parse_osm_xml(std::string_view(text));
}

namespace {

constexpr std::array<std::string_view, 9> kDrivableClasses = {
    "motorway", "trunk", "primary", "secondary", "tertiary",
    "unclassified", "residential", "living_street", "service",
};

ControlKind control_from_node_tag(const RawNode& node) {
    const auto it = node.tags.find("highway");
    if (it == node.tags.end()) {
        return ControlKind::None;
    }
    const std::string& v = it->second;
    if (v == "traffic_signals") return ControlKind::Signal;
    if (v == "stop") return ControlKind::Stop;
    if (v == "crossing") return ControlKind::Crossing;
    if (v == "give_way") return ControlKind::GiveWay;
    if (v == "mini_roundabout") return ControlKind::MiniRoundabout;
    return ControlKind::None;
}

enum class Direction { Both, Forward, Reverse };

Direction way_direction(const RawWay& way) {
    const auto it = way.tags.find("oneway");
    if (it == way.tags.end()) {
        return Direction::Both;
    }
    const std::string& v = it->second;
    if (v == "yes" || v == "true" || v == "1") {
        return Direction::Forward;
    }
    if (v == "-1" || v == "reverse") {
        return Direction::Reverse;
    }
    return Direction::Both;
}

}  // namespace

std::span<const std::string_view> default_drivable_classes() {
    return kDrivableClasses;
}

bool is_drivable_highway(std::string_view highway_value, std::span<const std::string_view> base_classes) {
    std::string_view base = highway_value;
    if (base.ends_with("_link")) {
        base.remove_suffix(5);
    }
    for (const std::string_view cls : base_classes) {
        if (base == cls) {
            return true;
        }
    }
    return false;
}

RoadNetwork build_network(const std::vector<RawNode>& nodes, const std::vector<RawWay>& ways,
                          const SpeedTable& fallback_speeds, std::span<const std::string_view> drivable) {
    std::unordered_map<std::int64_t, const RawNode*> node_by_id;
    node_by_id.reserve(nodes.size());
    for (const RawNode& n : nodes) {
        node_by_id.emplace(n.id, &n);
    }

    std::vector<const RawWay*> kept;
    for (const RawWay& way : ways) {
        const auto it = way.tags.find("highway");
        if (it != way.tags.end() && is_drivable_highway(it->second, drivable)) {
            kept.push_back(&way);
        }
    }

    std::unordered_set<std::int64_t> used_node_ids;
    for (const RawWay* way : kept) {
        for (const std::int64_t ref : way->node_refs) {
            if (!node_by_id.contains(ref)) {
                throw DanglingNodeRef("way " + std::to_string(way->id) + " references missing node " +
                                      std::to_string(ref));
            }
            used_node_ids.insert(ref);
        }
    }

    std::vector<RoadNode> road_nodes;
    road_nodes.reserve(used_node_ids.size());
    for (const std::int64_t id : used_node_ids) {
        const RawNode& raw = *node_by_id.at(id);
        road_nodes.push_back(RoadNode{id, GeoPoint{raw.lat, raw.lon}, control_from_node_tag(raw)});
    }

    std::vector<RoadEdge> road_edges;
    EdgeId next_edge_id = 0;
    for (const RawWay* way : kept) {
        double speed_kph = 0.0;
        if (const auto tag = way->tags.find("maxspeed"); tag != way->tags.end()) {
            speed_kph = parse_maxspeed(tag->second).value_or(0.0);
        }
        if (speed_kph <= 0.0) {
            speed_kph = fallback_speeds.lookup(way->tags.at("highway"));
        }
        const Direction dir = way_direction(*way);
        for (std::size_t i = 0; i + 1 < way->node_refs.size(); ++i) {
            const std::int64_t from = way->node_refs[i];
            const std::int64_t to = way->node_refs[i + 1];
            const RawNode& raw_from = *node_by_id.at(from);
            const RawNode& raw_to = *node_by_id.at(to);
            const GeoPoint a{raw_from.lat, raw_from.lon};
            const GeoPoint b{raw_to.lat, raw_to.lon};
            const double length = haversine_m(a, b);
            // Degenerate segments (repeated refs or coincident coordinates)
            // would violate the positive-length edge invariant; skip them.
            if (from == to || !(length > 0.0)) {
                continue;
            }
            if (dir != Direction::Reverse) {
                road_edges.push_back(RoadEdge{next_edge_id++, from, to, length, speed_kph, 0.0});
            }
            if (dir != Direction::Forward) {
                road_edges.push_back(RoadEdge{next_edge_id++, to, from, length, speed_kph, 0.0});
            }
        }
    }

    if (road_nodes.empty()) {
        throw EmptyNetwork("build_network: no drivable ways in input");
    }
    const RoadNetwork full = RoadNetwork::create(std::move(road_nodes), std::move(road_edges));
    return largest_scc(full);
}

}  // namespace freeflow
