#include "freeflow/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freeflow/errors.hpp"

namespace freeflow {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open for reading");
    }
    return in;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Line-oriented CSV reader; strips trailing CR so CRLF inputs load too.
class CsvReader {
public:
    CsvReader(const std::filesystem::path& path, const std::string& expected_header)
        : path_(path.string()), in_(open_input(path)) {
        std::string header;
        if (!std::getline(in_, header)) {
            throw IoError(path_ + ": empty file, expected header '" + expected_header + "'");
        }
        if (!header.empty() && header.back() == '\r') {
            header.pop_back();
        }
        if (header != expected_header) {
            throw IoError(path_ + ": bad header '" + header + "', expected '" + expected_header + "'");
        }
        line_number_ = 1;
    }

    /// Next non-empty data row split on commas; false at end of file.
    bool next_row(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_number_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            fields.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                if (comma == std::string::npos) {
                    fields.push_back(line.substr(start));
                    break;
                }
                fields.push_back(line.substr(start, comma - start));
                start = comma + 1;
            }
            return true;
        }
        return false;
    }

    void require_fields(const std::vector<std::string>& fields, std::size_t expected) const {
        if (fields.size() != expected) {
            fail("expected " + std::to_string(expected) + " fields, got " +
                 std::to_string(fields.size()));
        }
    }

    std::int64_t to_int(const std::string& field, const char* what) const {
        std::int64_t value = 0;
        const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || p != field.data() + field.size()) {
            fail(std::string(what) + " '" + field + "' is not an integer");
        }
        return value;
    }

    double to_double(const std::string& field, const char* what) const {
        double value = 0.0;
        const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || p != field.data() + field.size()) {
            fail(std::string(what) + " '" + field + "' is not a number");
        }
        return value;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw IoError(path_ + ":" + std::to_string(line_number_) + ": " + message);
    }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

ordered_json parse_json_or_throw(const std::string& text, const std::string& context) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------- network

void save_network_json(const RoadNetwork& net, const std::filesystem::path& path) {
    ordered_json doc;
    doc["format_version"] = 1;
    ordered_json nodes = ordered_json::array();
    for (const RoadNode& n : net.nodes()) {
        nodes.push_back({{"id", n.id},
                         {"lat", n.point.lat_deg},
                         {"lon", n.point.lon_deg},
                         {"control", std::string(to_string(n.control))}});
    }
    doc["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const RoadEdge& e : net.edges()) {
        edges.push_back({{"id", e.edge_id},
                         {"from", e.from_node},
                         {"to", e.to_node},
                         {"length_m", e.length_m},
                         {"speed_kph", e.speed_kph}});
    }
    doc["edges"] = std::move(edges);
    ordered_json adjacency = ordered_json::object();
    for (const RoadNode& n : net.nodes()) {
        ordered_json out = ordered_json::array();
        for (const EdgeId eid : net.out_edges(n.id)) {
            out.push_back(eid);
        }
        adjacency[std::to_string(n.id)] = std::move(out);
    }
    doc["adjacency"] = std::move(adjacency);

    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

RoadNetwork load_network_json(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_or_throw(read_all(path), path.string());
    try {
        if (doc.at("format_version").get<int>() != 1) {
            throw IoError(path.string() + ": unsupported format_version");
        }
        std::vector<RoadNode> nodes;
        for (const auto& jn : doc.at("nodes")) {
            RoadNode node;
            node.id = jn.at("id").get<NodeId>();
            node.point = {jn.at("lat").get<double>(), jn.at("lon").get<double>()};
            const std::string control = jn.at("control").get<std::string>();
            const auto kind = control_kind_from_string(control);
            if (!kind) {
                throw IoError(path.string() + ": node " + std::to_string(node.id) +
                              " has unknown control '" + control + "'");
            }
            node.control = *kind;
            nodes.push_back(node);
        }
        std::vector<RoadEdge> edges;
        for (const auto& je : doc.at("edges")) {
            edges.push_back(RoadEdge{je.at("id").get<EdgeId>(), je.at("from").get<NodeId>(),
                                     je.at("to").get<NodeId>(), je.at("length_m").get<double>(),
                                     je.at("speed_kph").get<double>(), 0.0});
        }
        RoadNetwork net = RoadNetwork::create(std::move(nodes), std::move(edges));

        // The stored adjacency must agree with the one derived from edges.
        const auto& adjacency = doc.at("adjacency");
        if (adjacency.size() != net.node_count()) {
            throw IoError(path.string() + ": adjacency has " + std::to_string(adjacency.size()) +
                          " entries for " + std::to_string(net.node_count()) + " nodes");
        }
        for (const RoadNode& n : net.nodes()) {
            const auto it = adjacency.find(std::to_string(n.id));
            if (it == adjacency.end()) {
                throw IoError(path.string() + ": adjacency is missing node " + std::to_string(n.id));
            }
            const auto expected = net.out_edges(n.id);
            if (it->size() != expected.size() ||
                !std::equal(expected.begin(), expected.end(), it->begin(),
                            [](EdgeId a, const ordered_json& b) { return a == b.get<EdgeId>(); })) {
                throw IoError(path.string() + ": adjacency of node " + std::to_string(n.id) +
                              " does not match the edge list");
            }
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- OD pairs

void save_od_csv(std::span<const ODPair> pairs, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "pair_id,origin,destination\n";
    for (const ODPair& p : pairs) {
        out << p.pair_id << ',' << p.origin << ',' << p.destination << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::vector<ODPair> load_od_csv(const std::filesystem::path& path) {
    CsvReader reader(path, "pair_id,origin,destination");
    std::vector<ODPair> pairs;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 3);
        ODPair p;
        p.pair_id = reader.to_int(fields[0], "pair_id");
        p.origin = reader.to_int(fields[1], "origin");
        p.destination = reader.to_int(fields[2], "destination");
        if (p.origin == p.destination) {
            reader.fail("pair " + std::to_string(p.pair_id) + " has origin == destination");
        }
        pairs.push_back(p);
    }
    return pairs;
}

std::vector<std::pair<NodeId, NodeId>> load_od_whitelist_csv(const std::filesystem::path& path) {
    CsvReader reader(path, "origin,destination");
    std::vector<std::pair<NodeId, NodeId>> rows;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 2);
        rows.emplace_back(reader.to_int(fields[0], "origin"), reader.to_int(fields[1], "destination"));
    }
    return rows;
}

// ---------------------------------------------------------------- routes

void save_routes_jsonl(std::span<const RouteRecord> records, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const RouteRecord& r : records) {
        ordered_json line;
        line["pair_id"] = r.pair_id;
        line["node_seq"] = r.node_seq;
        line["naive_tt_s"] = r.naive_tt_s;
        line["length_m"] = r.length_m;
        out << line.dump() << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::vector<RouteRecord> load_routes_jsonl(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<RouteRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string context = path.string() + ":" + std::to_string(line_number);
        const ordered_json doc = parse_json_or_throw(line, context);
        try {
            RouteRecord r;
            r.pair_id = doc.at("pair_id").get<std::int64_t>();
            r.node_seq = doc.at("node_seq").get<std::vector<NodeId>>();
            r.naive_tt_s = doc.at("naive_tt_s").get<double>();
            r.length_m = doc.at("length_m").get<double>();
            if (r.node_seq.empty()) {
                throw IoError(context + ": node_seq must not be empty");
            }
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(context + ": " + e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------- features

void save_features_csv(std::span<const FeatureRecord> records, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "pair_id";
    for (const std::string& name : feature_names()) {
        out << ',' << name;
    }
    out << '\n';
    for (const FeatureRecord& r : records) {
        const FeatureVector& f = r.features;
        out << r.pair_id << ',' << format_double(f.naive_tt_s) << ',' << f.n_signal << ','
            << f.n_stop << ',' << f.n_crossing << ',' << f.n_give_way << ',' << f.n_mini_roundabout
            << ',' << f.n_left << ',' << f.n_slight_left << ',' << f.n_right << ','
            << f.n_slight_right << ',' << f.n_uturn << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::vector<FeatureRecord> load_features_csv(const std::filesystem::path& path) {
    std::string header = "pair_id";
    for (const std::string& name : feature_names()) {
        header += ',';
        header += name;
    }
    CsvReader reader(path, header);
    std::vector<FeatureRecord> records;
    std::vector<std::string> fields;
    const auto to_count = [&reader](const std::string& field, const char* what) {
        const std::int64_t v = reader.to_int(field, what);
        if (v < 0) {
            reader.fail(std::string(what) + " must be >= 0");
        }
        return static_cast<std::uint32_t>(v);
    };
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 12);
        FeatureRecord r;
        r.pair_id = reader.to_int(fields[0], "pair_id");
        r.features.naive_tt_s = reader.to_double(fields[1], "naive_tt_s");
        r.features.n_signal = to_count(fields[2], "n_signal");
        r.features.n_stop = to_count(fields[3], "n_stop");
        r.features.n_crossing = to_count(fields[4], "n_crossing");
        r.features.n_give_way = to_count(fields[5], "n_give_way");
        r.features.n_mini_roundabout = to_count(fields[6], "n_mini_roundabout");
        r.features.n_left = to_count(fields[7], "n_left");
        r.features.n_slight_left = to_count(fields[8], "n_slight_left");
        r.features.n_right = to_count(fields[9], "n_right");
        r.features.n_slight_right = to_count(fields[10], "n_slight_right");
        r.features.n_uturn = to_count(fields[11], "n_uturn");
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------- reference

void save_reference_csv(std::span<const ReferenceObservation> refs, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "pair_id,actual_s\n";
    for (const ReferenceObservation& r : refs) {
        out << r.pair_id << ',' << format_double(r.actual_s) << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::vector<ReferenceObservation> load_reference_csv(const std::filesystem::path& path) {
    CsvReader reader(path, "pair_id,actual_s");
    std::vector<ReferenceObservation> refs;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 2);
        ReferenceObservation r;
        r.pair_id = reader.to_int(fields[0], "pair_id");
        r.actual_s = reader.to_double(fields[1], "actual_s");
        if (!(r.actual_s > 0.0)) {
            reader.fail("actual_s for pair " + std::to_string(r.pair_id) + " must be > 0");
        }
        refs.push_back(r);
    }
    return refs;
}

// ---------------------------------------------------------------- predictions

void save_predictions_csv(std::span<const Prediction> preds, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "pair_id,predicted_s\n";
    for (const Prediction& p : preds) {
        out << p.pair_id << ',' << format_double(p.predicted_s) << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::vector<Prediction> load_predictions_csv(const std::filesystem::path& path) {
    CsvReader reader(path, "pair_id,predicted_s");
    std::vector<Prediction> preds;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 2);
        Prediction p;
        p.pair_id = reader.to_int(fields[0], "pair_id");
        p.predicted_s = reader.to_double(fields[1], "predicted_s");
        preds.push_back(p);
    }
    return preds;
}

// ---------------------------------------------------------------- model

namespace {

ordered_json tree_node_to_json(const Tree& tree, std::int32_t pos) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(pos)];
    if (node.is_leaf()) {
        return ordered_json{{"leaf", {{"value", node.value}, {"n", node.n}}}};
    }
    ordered_json split;
    split["f"] = node.feature;
    split["t"] = node.threshold;
    split["l"] = tree_node_to_json(tree, node.left);
    split["r"] = tree_node_to_json(tree, node.right);
    return ordered_json{{"split", std::move(split)}};
}

std::int32_t tree_node_from_json(const ordered_json& j, Tree& tree, const std::string& context) {
    const std::int32_t pos = static_cast<std::int32_t>(tree.nodes.size());
    if (j.contains("leaf")) {
        const auto& leaf = j.at("leaf");
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf.at("value").get<double>(),
                                      leaf.at("n").get<std::uint32_t>()});
        if (tree.nodes.back().n < 1) {
            throw IoError(context + ": leaf has n < 1");
        }
        return pos;
    }
    if (!j.contains("split")) {
        throw IoError(context + ": tree node is neither leaf nor split");
    }
    const auto& split = j.at("split");
    tree.nodes.push_back(TreeNode{split.at("f").get<std::int32_t>(), split.at("t").get<double>(),
                                  -1, -1, 0.0, 0});
    if (tree.nodes[static_cast<std::size_t>(pos)].feature < 0) {
        throw IoError(context + ": split has negative feature index");
    }
    const std::int32_t left = tree_node_from_json(split.at("l"), tree, context);
    const std::int32_t right = tree_node_from_json(split.at("r"), tree, context);
    tree.nodes[static_cast<std::size_t>(pos)].left = left;
    tree.nodes[static_cast<std::size_t>(pos)].right = right;
    return pos;
}

ordered_json params_to_json(const ForestParams& p) {
    ordered_json j;
    j["n_trees"] = p.n_trees;
    j["max_depth"] = p.max_depth;
    j["min_samples_split"] = p.min_samples_split;
    if (p.max_features) {
        j["max_features"] = *p.max_features;
    } else {
        j["max_features"] = nullptr;
    }
    j["bootstrap"] = p.bootstrap;
    j["seed"] = p.seed;
    return j;
}

ForestParams params_from_json(const ordered_json& j) {
    ForestParams p;
    p.n_trees = j.at("n_trees").get<int>();
    p.max_depth = j.at("max_depth").get<int>();
    p.min_samples_split = j.at("min_samples_split").get<int>();
    if (j.at("max_features").is_null()) {
        p.max_features = std::nullopt;
    } else {
        p.max_features = j.at("max_features").get<int>();
    }
    p.bootstrap = j.at("bootstrap").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

}  // namespace

std::string model_to_json(const RegressionForest& forest) {
    ordered_json doc;
    doc["format_version"] = 1;
    doc["params"] = params_to_json(forest.params);
    doc["feature_names"] = forest.feature_names;
    ordered_json trees = ordered_json::array();
    ordered_json importances = ordered_json::array();
    for (const Tree& tree : forest.trees) {
        trees.push_back(tree_node_to_json(tree, 0));
        importances.push_back(tree.importance_raw);
    }
    doc["trees"] = std::move(trees);
    doc["tree_importances"] = std::move(importances);
    return doc.dump(2) + "\n";
}

RegressionForest model_from_json(const std::string& text, const std::string& context) {
    const ordered_json doc = parse_json_or_throw(text, context);
    try {
        if (doc.at("format_version").get<int>() != 1) {
            throw IoError(context + ": unsupported format_version");
        }
        RegressionForest forest;
        forest.params = params_from_json(doc.at("params"));
        forest.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        const auto& trees = doc.at("trees");
        const auto& importances = doc.at("tree_importances");
        if (trees.size() != importances.size()) {
            throw IoError(context + ": trees and tree_importances lengths differ");
        }
        forest.trees.reserve(trees.size());
        for (std::size_t t = 0; t < trees.size(); ++t) {
            Tree tree;
            tree_node_from_json(trees[t], tree, context);
            tree.importance_raw = importances[t].get<std::vector<double>>();
            if (tree.importance_raw.size() != forest.feature_names.size()) {
                throw IoError(context + ": tree importance width does not match feature_names");
            }
            forest.trees.push_back(std::move(tree));
        }
        if (forest.trees.empty()) {
            throw IoError(context + ": model has no trees");
        }
        for (const Tree& tree : forest.trees) {
            for (const TreeNode& node : tree.nodes) {
                if (!node.is_leaf() &&
                    static_cast<std::size_t>(node.feature) >= forest.feature_names.size()) {
                    throw IoError(context + ": split references feature " +
                                  std::to_string(node.feature) + " outside feature_names");
                }
            }
        }
        return forest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
}

void save_model_json(const RegressionForest& forest, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << model_to_json(forest);
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

RegressionForest load_model_json(const std::filesystem::path& path) {
    return model_from_json(read_all(path), path.string());
}

// ---------------------------------------------------------------- report

namespace {

ordered_json report_to_json(const EvalReport& report) {
    ordered_json j;
    j["n"] = report.n;
    j["mape_pct"] = report.mape_pct;
    j["mae_s"] = report.mae_s;
    j["mse_s2"] = report.mse_s2;
    j["delta_s"] = report.delta_s;
    if (report.p_value) {
        j["p_value"] = *report.p_value;
    } else {
        j["p_value"] = nullptr;
    }
    j["apr"] = report.apr;
    j["r2"] = report.r2;
    return j;
}

}  // namespace

void save_report_json(const EvalReport& report, const std::optional<EvalReport>& baseline,
                      const std::string& model_id, const std::string& dataset_id,
                      const std::string& timestamp, const std::filesystem::path& path) {
    ordered_json doc = report_to_json(report);
    doc["model_id"] = model_id;
    doc["dataset_id"] = dataset_id;
    doc["timestamp"] = timestamp;
    if (baseline) {
        doc["baseline"] = report_to_json(*baseline);
    }
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

// ---------------------------------------------------------------- speed table

SpeedTable load_speed_table_csv(const std::filesystem::path& path) {
    CsvReader reader(path, "highway_class,kph");
    std::unordered_map<std::string, double> entries;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        reader.require_fields(fields, 2);
        const double kph = reader.to_double(fields[1], "kph");
        if (!(kph > 0.0)) {
            reader.fail("speed for class '" + fields[0] + "' must be > 0");
        }
        entries[fields[0]] = kph;
    }
    return SpeedTable(std::move(entries), SpeedTable().default_kph());
}

// ---------------------------------------------------------------- delay model

void save_delay_model_json(const DelayModel& m, const std::filesystem::path& path) {
    ordered_json doc;
    doc["control_delays_s"] = {{"signal", m.signal_s},
                               {"stop", m.stop_s},
                               {"crossing", m.crossing_s},
                               {"give_way", m.give_way_s},
                               {"mini_roundabout", m.mini_roundabout_s}};
    doc["turn_delays_s"] = {{"left", m.left_s},       {"slight_left", m.slight_left_s},
                            {"right", m.right_s},     {"slight_right", m.slight_right_s},
                            {"uturn", m.uturn_s},     {"straight", m.straight_s}};
    doc["gamma"] = m.gamma;
    doc["noise_sigma_s"] = m.noise_sigma_s;
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

DelayModel load_delay_model_json(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_or_throw(read_all(path), path.string());
    DelayModel m;
    try {
        const auto read_field = [](const ordered_json& j, const char* key, double& target) {
            if (j.contains(key)) {
                target = j.at(key).get<double>();
            }
        };
        if (doc.contains("control_delays_s")) {
            const auto& c = doc.at("control_delays_s");
            read_field(c, "signal", m.signal_s);
            read_field(c, "stop", m.stop_s);
            read_field(c, "crossing", m.crossing_s);
            read_field(c, "give_way", m.give_way_s);
            read_field(c, "mini_roundabout", m.mini_roundabout_s);
        }
        if (doc.contains("turn_delays_s")) {
            const auto& t = doc.at("turn_delays_s");
            read_field(t, "left", m.left_s);
            read_field(t, "slight_left", m.slight_left_s);
            read_field(t, "right", m.right_s);
            read_field(t, "slight_right", m.slight_right_s);
            read_field(t, "uturn", m.uturn_s);
            read_field(t, "straight", m.straight_s);
        }
        read_field(doc, "gamma", m.gamma);
        read_field(doc, "noise_sigma_s", m.noise_sigma_s);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    const double fields[] = {m.signal_s, m.stop_s,  m.crossing_s,     m.give_way_s,
                             m.mini_roundabout_s,   m.left_s,         m.slight_left_s,
                             m.right_s,  m.slight_right_s, m.uturn_s, m.straight_s,
                             m.gamma,    m.noise_sigma_s};
    for (const double v : fields) {
        if (!(v >= 0.0)) {
            throw IoError(path.string() + ": delay model values must be >= 0");
        }
    }
    return m;
}

// ---------------------------------------------------------------- tuning result

void save_search_result_json(const SearchResult& result, int budget, int folds, std::uint64_t seed,
                             const std::filesystem::path& path) {
    ordered_json doc;
    doc["params"] = params_to_json(result.best);
    doc["cv_mae"] = result.best_cv_mae;
    doc["budget"] = budget;
    doc["folds"] = folds;
    doc["seed"] = seed;
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::string utc_timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace freeflow
