#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeflow/eval.hpp"
#include "freeflow/features.hpp"
#include "freeflow/forest.hpp"
#include "freeflow/network.hpp"
#include "freeflow/routing.hpp"
#include "freeflow/synth.hpp"

namespace freeflow {

/// All readers/writers throw IoError naming the file and, where known, the
/// offending record. CSV files are comma-separated, UTF-8, LF line endings,
/// '.' decimal point, header row required. Numbers are written with full
/// round-trip precision.

// -- network cache (JSON: format_version, nodes, edges, adjacency) --
void save_network_json(const RoadNetwork& net, const std::filesystem::path& path);
RoadNetwork load_network_json(const std::filesystem::path& path);

// -- OD pairs (CSV: pair_id,origin,destination) --
void save_od_csv(std::span<const ODPair> pairs, const std::filesystem::path& path);
std::vector<ODPair> load_od_csv(const std::filesystem::path& path);

// -- OD whitelist (CSV: origin,destination) --
std::vector<std::pair<NodeId, NodeId>> load_od_whitelist_csv(const std::filesystem::path& path);

// -- routes (JSON lines: pair_id, node_seq, naive_tt_s, length_m) --
struct RouteRecord {
    std::int64_t pair_id = 0;
    std::vector<NodeId> node_seq;
    double naive_tt_s = 0.0;
    double length_m = 0.0;
};
void save_routes_jsonl(std::span<const RouteRecord> records, const std::filesystem::path& path);
std::vector<RouteRecord> load_routes_jsonl(const std::filesystem::path& path);

// -- features (CSV: pair_id + the 11 predictors in fixed order) --
struct FeatureRecord {
    std::int64_t pair_id = 0;
    FeatureVector features;
};
void save_features_csv(std::span<const FeatureRecord> records, const std::filesystem::path& path);
std::vector<FeatureRecord> load_features_csv(const std::filesystem::path& path);

// -- reference travel times (CSV: pair_id,actual_s) --
void save_reference_csv(std::span<const ReferenceObservation> refs, const std::filesystem::path& path);
std::vector<ReferenceObservation> load_reference_csv(const std::filesystem::path& path);

// -- predictions (CSV: pair_id,predicted_s) --
struct Prediction {
    std::int64_t pair_id = 0;
    double predicted_s = 0.0;
};
void save_predictions_csv(std::span<const Prediction> preds, const std::filesystem::path& path);
std::vector<Prediction> load_predictions_csv(const std::filesystem::path& path);

// -- model (JSON: format_version, params, feature_names, trees as nested
//    leaf/split objects, tree_importances) --
std::string model_to_json(const RegressionForest& forest);
RegressionForest model_from_json(const std::string& text, const std::string& context);
void save_model_json(const RegressionForest& forest, const std::filesystem::path& path);
RegressionForest load_model_json(const std::filesystem::path& path);

// -- evaluation report (JSON: EvalReport fields + model_id, dataset_id,
//    timestamp; optional baseline sub-report) --
void save_report_json(const EvalReport& report, const std::optional<EvalReport>& baseline,
                      const std::string& model_id, const std::string& dataset_id,
                      const std::string& timestamp, const std::filesystem::path& path);

// -- fallback speed table (CSV: highway_class,kph) --
SpeedTable load_speed_table_csv(const std::filesystem::path& path);

// -- delay model (JSON: control_delays_s, turn_delays_s, gamma,
//    noise_sigma_s; missing fields keep their defaults) --
void save_delay_model_json(const DelayModel& model, const std::filesystem::path& path);
DelayModel load_delay_model_json(const std::filesystem::path& path);

// -- tuning result (JSON: params, cv_mae, budget, folds, seed) --
void save_search_result_json(const SearchResult& result, int budget, int folds, std::uint64_t seed,
                             const std::filesystem::path& path);

/// ISO-8601 UTC timestamp for report metadata.
std::string utc_timestamp_now();

}  // namespace freeflow
