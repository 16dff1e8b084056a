#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <mutex>
#include <thread>

#include "freeflow/errors.hpp"
#include "freeflow/eval.hpp"
#include "freeflow/features.hpp"
#include "freeflow/forest.hpp"
#include "freeflow/io.hpp"
#include "freeflow/osm.hpp"
#include "freeflow/routing.hpp"
#include "freeflow/synth.hpp"

namespace {

constexpr const char* kVersion = "freeflow 0.1.0";

using namespace freeflow;

// ------------------------------------------------------------------ helpers

/// Run fn(i) for i in [0, count) on up to n_threads workers (0 = auto).
/// Results are index-addressed by the callers, so scheduling never affects
/// output order.
template <typename Fn>
void run_indexed(std::size_t count, unsigned n_threads, Fn&& fn) {
    unsigned workers = n_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n_threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void nlohmann_dump_cv(const std::vector<double>& maes, double mean, const std::string& out_path) {
    nlohmann::ordered_json doc;
    doc["fold_mae_s"] = maes;
    doc["mean_mae_s"] = mean;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw IoError(out_path + ": cannot open for writing");
    }
    out << doc.dump(2) << '\n';
}

void nlohmann_dump_importance(const std::vector<std::string>& names,
                              const ImportanceResult& importance, const std::string& out_path) {
    nlohmann::ordered_json weights = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        weights[names[i]] = importance.weights[i];
    }
    nlohmann::ordered_json doc;
    doc["no_splits"] = importance.no_splits;
    doc["weights"] = std::move(weights);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw IoError(out_path + ": cannot open for writing");
    }
    out << doc.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream stream(csv);
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) {
            out.push_back(token);
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv, const std::string& flag) {
    std::vector<int> out;
    for (const std::string& token : split_list(csv)) {
        int value = 0;
        const auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || p != token.data() + token.size()) {
            throw Error(flag + ": '" + token + "' is not an integer");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    for (const std::string& token : split_list(csv)) {
        double value = 0.0;
        const auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || p != token.data() + token.size()) {
            throw Error(flag + ": '" + token + "' is not a number");
        }
        out.push_back(value);
    }
    return out;
}

/// Inner join of features and references on pair_id, in feature-file order.
/// Rows without a reference are skipped with a note on stderr.
struct TrainingData {
    Matrix X;
    std::vector<double> y;
    std::vector<std::int64_t> pair_ids;
};

TrainingData join_features_and_refs(const std::vector<FeatureRecord>& features,
                                    const std::vector<ReferenceObservation>& refs,
                                    const std::string& features_path, const std::string& refs_path) {
    std::unordered_map<std::int64_t, double> ref_by_pair;
    ref_by_pair.reserve(refs.size());
    for (const ReferenceObservation& r : refs) {
        if (!ref_by_pair.emplace(r.pair_id, r.actual_s).second) {
            throw IoError(refs_path + ": duplicate pair_id " + std::to_string(r.pair_id));
        }
    }
    TrainingData data;
    std::size_t skipped = 0;
    std::vector<std::array<double, kFeatureCount>> rows;
    for (const FeatureRecord& f : features) {
        const auto it = ref_by_pair.find(f.pair_id);
        if (it == ref_by_pair.end()) {
            ++skipped;
            continue;
        }
        rows.push_back(f.features.as_row());
        data.y.push_back(it->second);
        data.pair_ids.push_back(f.pair_id);
    }
    if (rows.empty()) {
        throw IoError(features_path + ": no pair_id overlaps with " + refs_path);
    }
    if (skipped > 0) {
        std::cerr << "note: " << skipped << " feature rows in " << features_path
                  << " had no reference in " << refs_path << " and were skipped\n";
    }
    data.X = Matrix(rows.size(), kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), data.X.row(i).begin());
    }
    return data;
}

Matrix features_to_matrix(const std::vector<FeatureRecord>& features) {
    Matrix X(features.size(), kFeatureCount);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto row = features[i].features.as_row();
        std::copy(row.begin(), row.end(), X.row(i).begin());
    }
    return X;
}

std::vector<std::string> canonical_feature_names() {
    const auto& names = feature_names();
    return {names.begin(), names.end()};
}

// ------------------------------------------------------------------ options

struct ForestFlags {
    int trees = 400;
    int max_depth = 10;
    int min_split = 2;
    int max_features = 0;  // 0 = all features
    bool no_bootstrap = false;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--trees", trees, "Number of trees")->capture_default_str();
        cmd->add_option("--max-depth", max_depth, "Maximum tree depth")->capture_default_str();
        cmd->add_option("--min-split", min_split, "Minimum samples to split a node")
            ->capture_default_str();
        cmd->add_option("--max-features", max_features,
                        "Features considered per split (0 = all)")
            ->capture_default_str();
        cmd->add_flag("--no-bootstrap", no_bootstrap, "Disable bootstrap resampling");
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    }

    ForestParams to_params() const {
        ForestParams p;
        p.n_trees = trees;
        p.max_depth = max_depth;
        p.min_samples_split = min_split;
        p.max_features = max_features > 0 ? std::optional<int>(max_features) : std::nullopt;
        p.bootstrap = !no_bootstrap;
        p.seed = seed;
        return p;
    }
};

unsigned resolve_threads(int threads_flag) {
    return threads_flag <= 0 ? 0u : static_cast<unsigned>(threads_flag);
}

// ------------------------------------------------------------------ commands

int cmd_build(const std::string& osm_path, const std::string& out_path,
              const std::string& speed_table_path, const std::string& drivable_csv) {
    std::ifstream in(osm_path, std::ios::binary);
    if (!in) {
        throw IoError(osm_path + ": cannot open for reading");
    }
    OsmData data;
    try {
        data = parse_osm_xml(in);
    } catch (const MalformedXml& e) {
        throw IoError(osm_path + ": " + e.what());
    } catch (const DuplicateId& e) {
        throw IoError(osm_path + ": " + e.what());
    }

    const SpeedTable speeds =
        speed_table_path.empty() ? SpeedTable() : load_speed_table_csv(speed_table_path);

    RoadNetwork net = [&] {
        if (drivable_csv.empty()) {
            return build_network(data.nodes, data.ways, speeds);
        }
        const std::vector<std::string> classes = split_list(drivable_csv);
        std::vector<std::string_view> views(classes.begin(), classes.end());
        return build_network(data.nodes, data.ways, speeds, views);
    }();

    save_network_json(net, out_path);
    std::cout << "network: " << net.node_count() << " nodes, " << net.edge_count()
              << " edges (largest strongly connected component)\n";
    return 0;
}

int cmd_sample_od(const std::string& net_path, std::size_t count, std::uint64_t seed,
                  const std::string& out_path, const std::string& whitelist_path) {
    const RoadNetwork net = load_network_json(net_path);
    std::vector<ODPair> pairs;
    if (whitelist_path.empty()) {
        pairs = sample_od_pairs(net, count, seed);
    } else {
        const auto whitelist = load_od_whitelist_csv(whitelist_path);
        pairs = sample_od_pairs_from(net, whitelist, count, seed);
    }
    save_od_csv(pairs, out_path);
    std::cout << "sampled " << pairs.size() << " od pairs\n";
    return 0;
}

int cmd_route(const std::string& net_path, const std::string& od_path, const std::string& out_path,
              int threads) {
    const RoadNetwork net = load_network_json(net_path);
    const std::vector<ODPair> pairs = load_od_csv(od_path);
    for (const ODPair& p : pairs) {
        if (!net.has_node(p.origin) || !net.has_node(p.destination)) {
            throw IoError(od_path + ": pair " + std::to_string(p.pair_id) +
                          " references a node outside the network");
        }
    }

    std::vector<RouteRecord> records(pairs.size());
    const auto route_one = [&](std::size_t i) {
        const Route route = shortest_path(net, pairs[i].origin, pairs[i].destination);
        records[i] = RouteRecord{pairs[i].pair_id, route.node_seq, route.naive_tt_s, route.length_m};
    };
    run_indexed(pairs.size(), resolve_threads(threads), route_one);
    std::sort(records.begin(), records.end(),
              [](const RouteRecord& a, const RouteRecord& b) { return a.pair_id < b.pair_id; });
    save_routes_jsonl(records, out_path);
    std::cout << "routed " << records.size() << " pairs\n";
    return 0;
}

int cmd_features(const std::string& net_path, const std::string& routes_path,
                 const std::string& out_path, int threads) {
    const RoadNetwork net = load_network_json(net_path);
    const std::vector<RouteRecord> routes = load_routes_jsonl(routes_path);
    for (const RouteRecord& r : routes) {
        for (const NodeId node : r.node_seq) {
            if (!net.has_node(node)) {
                throw IoError(routes_path + ": pair " + std::to_string(r.pair_id) +
                              " references node " + std::to_string(node) +
                              " outside the network");
            }
        }
    }

    std::vector<FeatureRecord> records(routes.size());
    const auto extract_one = [&](std::size_t i) {
        Route route;
        route.node_seq = routes[i].node_seq;
        route.naive_tt_s = routes[i].naive_tt_s;
        route.length_m = routes[i].length_m;
        records[i] = FeatureRecord{routes[i].pair_id, feature_vector(net, route)};
    };
    run_indexed(routes.size(), resolve_threads(threads), extract_one);
    save_features_csv(records, out_path);
    std::cout << "extracted features for " << records.size() << " routes\n";
    return 0;
}

int cmd_synth_net(int rows, int cols, std::uint64_t seed, const std::string& out_path,
                  const std::string& speeds_csv, const std::vector<double>& probs_flags) {
    ControlProbabilities probs;
    if (!probs_flags.empty()) {
        probs.signal = probs_flags[0];
        probs.stop = probs_flags[1];
        probs.crossing = probs_flags[2];
        probs.give_way = probs_flags[3];
        probs.mini_roundabout = probs_flags[4];
    }
    RoadNetwork net = [&] {
        if (speeds_csv.empty()) {
            return grid_network(rows, cols, seed, probs);
        }
        const std::vector<double> speeds = parse_double_list(speeds_csv, "--speeds");
        return grid_network(rows, cols, seed, probs, speeds);
    }();
    save_network_json(net, out_path);
    std::cout << "grid: " << net.node_count() << " nodes, " << net.edge_count() << " edges\n";
    return 0;
}

int cmd_synth_ref(const std::string& features_path, std::uint64_t seed, const std::string& out_path,
                  const std::string& delay_model_path) {
    const std::vector<FeatureRecord> features = load_features_csv(features_path);
    const DelayModel model =
        delay_model_path.empty() ? DelayModel() : load_delay_model_json(delay_model_path);
    std::vector<ReferenceObservation> refs;
    refs.reserve(features.size());
    for (const FeatureRecord& f : features) {
        refs.push_back({f.pair_id, synthetic_truth(f.features, model, seed, f.pair_id)});
    }
    save_reference_csv(refs, out_path);
    std::cout << "generated " << refs.size() << " reference times\n";
    return 0;
}

int cmd_train(const std::string& features_path, const std::string& refs_path,
              const std::string& out_path, const ForestFlags& flags, int threads) {
    const TrainingData data = join_features_and_refs(
        load_features_csv(features_path), load_reference_csv(refs_path), features_path, refs_path);
    RegressionForest forest = fit_forest(data.X, data.y, flags.to_params(), resolve_threads(threads));
    forest.feature_names = canonical_feature_names();
    save_model_json(forest, out_path);
    std::cout << "trained " << forest.trees.size() << " trees on " << data.y.size() << " samples\n";
    return 0;
}

int cmd_tune(const std::string& features_path, const std::string& refs_path,
             const std::string& out_path, const std::string& trees_csv,
             const std::string& depth_csv, const std::string& min_split_csv,
             const std::string& max_features_csv, const std::string& bootstrap_csv, int budget,
             int folds, std::uint64_t seed, int threads) {
    const TrainingData data = join_features_and_refs(
        load_features_csv(features_path), load_reference_csv(refs_path), features_path, refs_path);

    ParamSpace space;
    if (!trees_csv.empty()) space.n_trees = parse_int_list(trees_csv, "--trees");
    if (!depth_csv.empty()) space.max_depth = parse_int_list(depth_csv, "--max-depth");
    if (!min_split_csv.empty()) space.min_samples_split = parse_int_list(min_split_csv, "--min-split");
    if (!max_features_csv.empty()) {
        space.max_features.clear();
        for (const std::string& token : split_list(max_features_csv)) {
            if (token == "all") {
                space.max_features.push_back(std::nullopt);
            } else {
                space.max_features.push_back(parse_int_list(token, "--max-features").front());
            }
        }
    }
    if (!bootstrap_csv.empty()) {
        space.bootstrap.clear();
        for (const std::string& token : split_list(bootstrap_csv)) {
            if (token == "true" || token == "1") {
                space.bootstrap.push_back(true);
            } else if (token == "false" || token == "0") {
                space.bootstrap.push_back(false);
            } else {
                throw Error("--bootstrap: '" + token + "' is not true/false");
            }
        }
    }

    const SearchResult result =
        random_search(data.X, data.y, space, budget, folds, seed, resolve_threads(threads));
    save_search_result_json(result, budget, folds, seed, out_path);
    std::cout << "best cv mae: " << result.best_cv_mae << " (trees=" << result.best.n_trees
              << ", max_depth=" << result.best.max_depth << ")\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& features_path,
                const std::string& out_path) {
    const RegressionForest forest = load_model_json(model_path);
    const std::vector<FeatureRecord> features = load_features_csv(features_path);
    const std::vector<double> values = predict_forest(forest, features_to_matrix(features));
    std::vector<Prediction> preds;
    preds.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        preds.push_back({features[i].pair_id, values[i]});
    }
    save_predictions_csv(preds, out_path);
    std::cout << "predicted " << preds.size() << " pairs\n";
    return 0;
}

const char* improvement_marker(double model_value, double baseline_value, bool lower_is_better) {
    const bool better = lower_is_better ? model_value < baseline_value : model_value > baseline_value;
    return better ? "improved" : "regressed";
}

int cmd_evaluate(const std::string& pred_path, const std::string& refs_path,
                 const std::string& out_path, const std::string& baseline_path,
                 std::string model_id, std::string dataset_id) {
    const std::vector<Prediction> preds = load_predictions_csv(pred_path);
    const std::vector<ReferenceObservation> refs = load_reference_csv(refs_path);
    std::unordered_map<std::int64_t, double> ref_by_pair;
    for (const ReferenceObservation& r : refs) {
        ref_by_pair.emplace(r.pair_id, r.actual_s);
    }
    std::unordered_map<std::int64_t, double> baseline_by_pair;
    const bool have_baseline = !baseline_path.empty();
    if (have_baseline) {
        for (const Prediction& p : load_predictions_csv(baseline_path)) {
            baseline_by_pair.emplace(p.pair_id, p.predicted_s);
        }
    }

    std::vector<double> p_model;
    std::vector<double> p_base;
    std::vector<double> actual;
    std::size_t skipped = 0;
    for (const Prediction& p : preds) {
        const auto ref_it = ref_by_pair.find(p.pair_id);
        if (ref_it == ref_by_pair.end()) {
            ++skipped;
            continue;
        }
        if (have_baseline) {
            const auto base_it = baseline_by_pair.find(p.pair_id);
            if (base_it == baseline_by_pair.end()) {
                ++skipped;
                continue;
            }
            p_base.push_back(base_it->second);
        }
        p_model.push_back(p.predicted_s);
        actual.push_back(ref_it->second);
    }
    if (actual.empty()) {
        throw IoError(pred_path + ": no pair_id overlaps with " + refs_path);
    }
    if (skipped > 0) {
        std::cerr << "note: " << skipped << " prediction rows lacked a reference"
                  << (have_baseline ? " or baseline" : "") << " and were skipped\n";
    }

    const EvalReport report = evaluate(p_model, actual);
    std::optional<EvalReport> baseline;
    if (have_baseline) {
        baseline = evaluate(p_base, actual);
    }
    if (model_id.empty()) {
        model_id = pred_path;
    }
    if (dataset_id.empty()) {
        dataset_id = refs_path;
    }
    save_report_json(report, baseline, model_id, dataset_id, utc_timestamp_now(), out_path);

    std::cout << "n=" << report.n << " mape_pct=" << report.mape_pct << " mae_s=" << report.mae_s
              << " delta_s=" << report.delta_s << " apr=" << report.apr << " r2=" << report.r2;
    if (report.p_value) {
        std::cout << " p=" << *report.p_value;
    }
    std::cout << '\n';
    if (baseline) {
        std::cout << "baseline mape_pct=" << baseline->mape_pct << " mae_s=" << baseline->mae_s
                  << " -> mae " << improvement_marker(report.mae_s, baseline->mae_s, true) << '\n';
    }
    return 0;
}

int cmd_cv(const std::string& features_path, const std::string& refs_path, int folds,
           std::uint64_t seed, const ForestFlags& flags, const std::string& out_path, int threads) {
    const TrainingData data = join_features_and_refs(
        load_features_csv(features_path), load_reference_csv(refs_path), features_path, refs_path);
    const std::vector<double> maes =
        kfold_cv(data.X, data.y, flags.to_params(), folds, seed, resolve_threads(threads));
    double mean = std::accumulate(maes.begin(), maes.end(), 0.0) / static_cast<double>(maes.size());
    for (std::size_t i = 0; i < maes.size(); ++i) {
        std::cout << "fold " << i << " mae_s=" << maes[i] << '\n';
    }
    std::cout << "mean mae_s=" << mean << '\n';
    if (!out_path.empty()) {
        nlohmann_dump_cv(maes, mean, out_path);
    }
    return 0;
}

int cmd_importance(const std::string& model_path, const std::string& out_path) {
    const RegressionForest forest = load_model_json(model_path);
    const ImportanceResult importance = mdi_importance(forest);
    if (importance.no_splits) {
        std::cout << "model has no splits; importance undefined\n";
    }
    for (std::size_t i = 0; i < forest.feature_names.size(); ++i) {
        std::cout << forest.feature_names[i] << " " << importance.weights[i] << '\n';
    }
    if (!out_path.empty()) {
        nlohmann_dump_importance(forest.feature_names, importance, out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Travel-time estimation from open road networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- build
    std::string osm_path, net_out, speed_table_path, drivable_csv;
    CLI::App* build = app.add_subcommand("build", "Parse OSM XML into a routable network cache");
    build->add_option("--osm", osm_path, "Input OSM XML file")->required();
    build->add_option("--out", net_out, "Output network JSON")->required();
    build->add_option("--speed-table", speed_table_path, "Fallback speed CSV (highway_class,kph)");
    build->add_option("--drivable", drivable_csv, "Comma-separated drivable highway classes");

    // ---- sample-od
    std::string od_net, od_out, whitelist_path;
    std::size_t od_count = 1000;
    std::uint64_t od_seed = 0;
    CLI::App* sample = app.add_subcommand("sample-od", "Sample origin-destination pairs");
    sample->add_option("--net", od_net, "Network JSON")->required();
    sample->add_option("--count", od_count, "Number of pairs")->capture_default_str();
    sample->add_option("--seed", od_seed, "Random seed")->capture_default_str();
    sample->add_option("--out", od_out, "Output OD CSV")->required();
    sample->add_option("--whitelist", whitelist_path, "Restrict draws to this origin,destination CSV");

    // ---- route
    std::string route_net, route_od, route_out;
    int route_threads = 0;
    CLI::App* route = app.add_subcommand("route", "Shortest paths for every OD pair");
    route->add_option("--net", route_net, "Network JSON")->required();
    route->add_option("--od", route_od, "OD CSV")->required();
    route->add_option("--out", route_out, "Output routes JSONL")->required();
    route->add_option("--threads", route_threads, "Worker threads (0 = auto)")->capture_default_str();

    // ---- features
    std::string feat_net, feat_routes, feat_out;
    int feat_threads = 0;
    CLI::App* features = app.add_subcommand("features", "Extract predictors for routed pairs");
    features->add_option("--net", feat_net, "Network JSON")->required();
    features->add_option("--routes", feat_routes, "Routes JSONL")->required();
    features->add_option("--out", feat_out, "Output feature CSV")->required();
    features->add_option("--threads", feat_threads, "Worker threads (0 = auto)")->capture_default_str();

    // ---- synth-net
    int grid_rows = 20, grid_cols = 20;
    std::uint64_t grid_seed = 0;
    std::string grid_out, grid_speeds;
    std::vector<double> grid_probs;
    CLI::App* synth_net = app.add_subcommand("synth-net", "Generate a synthetic grid network");
    synth_net->add_option("--rows", grid_rows, "Grid rows")->capture_default_str();
    synth_net->add_option("--cols", grid_cols, "Grid columns")->capture_default_str();
    synth_net->add_option("--seed", grid_seed, "Random seed")->capture_default_str();
    synth_net->add_option("--out", grid_out, "Output network JSON")->required();
    synth_net->add_option("--speeds", grid_speeds, "Comma-separated speed set (km/h)");
    synth_net
        ->add_option("--control-probs", grid_probs,
                     "Five probabilities: signal stop crossing give_way mini_roundabout")
        ->expected(5);

    // ---- synth-ref
    std::string sref_features, sref_out, sref_delays;
    std::uint64_t sref_seed = 0;
    CLI::App* synth_ref = app.add_subcommand("synth-ref", "Synthesize reference travel times");
    synth_ref->add_option("--features", sref_features, "Feature CSV")->required();
    synth_ref->add_option("--seed", sref_seed, "Random seed")->capture_default_str();
    synth_ref->add_option("--out", sref_out, "Output reference CSV")->required();
    synth_ref->add_option("--delay-model", sref_delays, "Delay model JSON");

    // ---- train
    std::string train_features, train_refs, train_out;
    int train_threads = 0;
    ForestFlags train_flags;
    CLI::App* train = app.add_subcommand("train", "Fit the regression forest");
    train->add_option("--features", train_features, "Feature CSV")->required();
    train->add_option("--ref", train_refs, "Reference CSV")->required();
    train->add_option("--out", train_out, "Output model JSON")->required();
    train_flags.attach(train);
    train->add_option("--threads", train_threads, "Worker threads (0 = auto)")->capture_default_str();

    // ---- tune
    std::string tune_features, tune_refs, tune_out;
    std::string tune_trees, tune_depth, tune_min_split, tune_max_features, tune_bootstrap;
    int tune_budget = 10, tune_folds = 5, tune_threads = 0;
    std::uint64_t tune_seed = 0;
    CLI::App* tune = app.add_subcommand("tune", "Randomized hyperparameter search");
    tune->add_option("--features", tune_features, "Feature CSV")->required();
    tune->add_option("--ref", tune_refs, "Reference CSV")->required();
    tune->add_option("--out", tune_out, "Output JSON with the best parameters")->required();
    tune->add_option("--trees", tune_trees, "Candidate tree counts, e.g. 200,400");
    tune->add_option("--max-depth", tune_depth, "Candidate depths, e.g. 5,10,15");
    tune->add_option("--min-split", tune_min_split, "Candidate min samples to split");
    tune->add_option("--max-features", tune_max_features, "Candidates, integers or 'all'");
    tune->add_option("--bootstrap", tune_bootstrap, "Candidates: true,false");
    tune->add_option("--budget", tune_budget, "Configurations to sample")->capture_default_str();
    tune->add_option("--folds", tune_folds, "CV folds")->capture_default_str();
    tune->add_option("--seed", tune_seed, "Random seed")->capture_default_str();
    tune->add_option("--threads", tune_threads, "Worker threads (0 = auto)")->capture_default_str();

    // ---- predict
    std::string pred_model, pred_features, pred_out;
    CLI::App* predict = app.add_subcommand("predict", "Apply a trained model to features");
    predict->add_option("--model", pred_model, "Model JSON")->required();
    predict->add_option("--features", pred_features, "Feature CSV")->required();
    predict->add_option("--out", pred_out, "Output prediction CSV")->required();

    // ---- evaluate
    std::string eval_pred, eval_refs, eval_out, eval_baseline, eval_model_id, eval_dataset_id;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against references");
    evaluate_cmd->add_option("--pred", eval_pred, "Prediction CSV")->required();
    evaluate_cmd->add_option("--ref", eval_refs, "Reference CSV")->required();
    evaluate_cmd->add_option("--out", eval_out, "Output report JSON")->required();
    evaluate_cmd->add_option("--baseline", eval_baseline,
                             "Second prediction CSV reported for comparison");
    evaluate_cmd->add_option("--model-id", eval_model_id, "Report metadata");
    evaluate_cmd->add_option("--dataset-id", eval_dataset_id, "Report metadata");

    // ---- cv
    std::string cv_features, cv_refs, cv_out;
    int cv_folds = 5, cv_threads = 0;
    std::uint64_t cv_seed = 0;
    ForestFlags cv_flags;
    CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation MAE");
    cv->add_option("--features", cv_features, "Feature CSV")->required();
    cv->add_option("--ref", cv_refs, "Reference CSV")->required();
    cv->add_option("--folds", cv_folds, "Number of folds")->capture_default_str();
    cv_flags.attach(cv);
    cv->add_option("--cv-seed", cv_seed, "Fold shuffle seed")->capture_default_str();
    cv->add_option("--out", cv_out, "Optional output JSON");
    cv->add_option("--threads", cv_threads, "Worker threads (0 = auto)")->capture_default_str();

    // ---- importance
    std::string imp_model, imp_out;
    CLI::App* importance = app.add_subcommand("importance", "Per-feature MDI weights of a model");
    importance->add_option("--model", imp_model, "Model JSON")->required();
    importance->add_option("--out", imp_out, "Optional output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }

    try {
        if (build->parsed()) {
            return cmd_build(osm_path, net_out, speed_table_path, drivable_csv);
        }
        if (sample->parsed()) {
            return cmd_sample_od(od_net, od_count, od_seed, od_out, whitelist_path);
        }
        if (route->parsed()) {
            return cmd_route(route_net, route_od, route_out, route_threads);
        }
        if (features->parsed()) {
            return cmd_features(feat_net, feat_routes, feat_out, feat_threads);
        }
        if (synth_net->parsed()) {
            return cmd_synth_net(grid_rows, grid_cols, grid_seed, grid_out, grid_speeds, grid_probs);
        }
        if (synth_ref->parsed()) {
            return cmd_synth_ref(sref_features, sref_seed, sref_out, sref_delays);
        }
        if (train->parsed()) {
            return cmd_train(train_features, train_refs, train_out, train_flags, train_threads);
        }
        if (tune->parsed()) {
            return cmd_tune(tune_features, tune_refs, tune_out, tune_trees, tune_depth,
                            tune_min_split, tune_max_features, tune_bootstrap, tune_budget,
                            tune_folds, tune_seed, tune_threads);
        }
        if (predict->parsed()) {
            return cmd_predict(pred_model, pred_features, pred_out);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(eval_pred, eval_refs, eval_out, eval_baseline, eval_model_id,
                                eval_dataset_id);
        }
        if (cv->parsed()) {
            return cmd_cv(cv_features, cv_refs, cv_folds, cv_seed, cv_flags, cv_out, cv_threads);
        }
        if (importance->parsed()) {
            return cmd_importance(imp_model, imp_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
