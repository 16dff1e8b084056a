#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "freeflow/io.hpp"

using namespace freeflow;
namespace fs = std::filesystem;

namespace {

struct CliDir {
    fs::path path;
    CliDir() {
        path = fs::temp_directory_path() /
               ("freeflow_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~CliDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string command = std::string(FREEFLOW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    if (status == -1) {
        return -1;
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

const std::string kFixtureOsm = std::string(FREEFLOW_FIXTURE_DIR) + "/sample.osm.xml";

}  // namespace

TEST_CASE("cli: unknown flags exit with code 2") {
    CHECK(run_cli("--definitely-not-a-flag") == 2);
    CHECK(run_cli("train --bogus") == 2);
    CHECK(run_cli("") == 2);  // missing subcommand is a usage error
}

TEST_CASE("cli: --version exits 0") {
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: missing input files exit with code 1") {
    CliDir dir;
    CHECK(run_cli("build --osm " + dir.file("nope.xml") + " --out " + dir.file("net.json")) == 1);
    CHECK(run_cli("predict --model " + dir.file("no.json") + " --features " + dir.file("no.csv") +
                  " --out " + dir.file("p.csv")) == 1);
}

TEST_CASE("cli: full pipeline on the bundled fixture") {
    CliDir dir;
    const std::string net = dir.file("net.json");
    const std::string od = dir.file("od.csv");
    const std::string routes = dir.file("routes.jsonl");
    const std::string features = dir.file("features.csv");
    const std::string refs = dir.file("refs.csv");
    const std::string model = dir.file("model.json");
    const std::string preds = dir.file("preds.csv");
    const std::string report = dir.file("report.json");

    REQUIRE(run_cli("build --osm " + kFixtureOsm + " --out " + net) == 0);
    REQUIRE(run_cli("sample-od --net " + net + " --count 40 --seed 3 --out " + od) == 0);
    REQUIRE(run_cli("route --net " + net + " --od " + od + " --out " + routes + " --threads 2") == 0);
    REQUIRE(run_cli("features --net " + net + " --routes " + routes + " --out " + features) == 0);
    REQUIRE(run_cli("synth-ref --features " + features + " --seed 11 --out " + refs +
                    " --delay-model " + std::string(FREEFLOW_FIXTURE_DIR) + "/delays.json") == 0);
    REQUIRE(run_cli("train --features " + features + " --ref " + refs + " --out " + model +
                    " --trees 30 --max-depth 6 --seed 5 --threads 2") == 0);
    REQUIRE(run_cli("predict --model " + model + " --features " + features + " --out " + preds) == 0);
    REQUIRE(run_cli("evaluate --pred " + preds + " --ref " + refs + " --out " + report) == 0);

    // The chain produced consistent artifacts.
    const auto loaded_net = load_network_json(net);
    CHECK(loaded_net.node_count() > 0);
    CHECK(load_od_csv(od).size() == 40);
    CHECK(load_routes_jsonl(routes).size() == 40);
    CHECK(load_features_csv(features).size() == 40);
    CHECK(load_reference_csv(refs).size() == 40);
    CHECK(load_predictions_csv(preds).size() == 40);
    CHECK(slurp(report).find("mape_pct") != std::string::npos);
}

TEST_CASE("cli: the whole chain is byte-deterministic given identical seeds") {
    CliDir dir;
    const auto run_chain = [&](const std::string& tag, int threads) {
        const std::string net = dir.file("net_" + tag + ".json");
        const std::string od = dir.file("od_" + tag + ".csv");
        const std::string routes = dir.file("routes_" + tag + ".jsonl");
        const std::string features = dir.file("features_" + tag + ".csv");
        const std::string refs = dir.file("refs_" + tag + ".csv");
        const std::string model = dir.file("model_" + tag + ".json");
        const std::string pred = dir.file("pred_" + tag + ".csv");
        const std::string threads_arg = " --threads " + std::to_string(threads);
        REQUIRE(run_cli("synth-net --rows 5 --cols 5 --seed 7 --out " + net) == 0);
        REQUIRE(run_cli("sample-od --net " + net + " --count 60 --seed 1 --out " + od) == 0);
        REQUIRE(run_cli("route --net " + net + " --od " + od + " --out " + routes + threads_arg) == 0);
        REQUIRE(run_cli("features --net " + net + " --routes " + routes + " --out " + features +
                        threads_arg) == 0);
        REQUIRE(run_cli("synth-ref --features " + features + " --seed 2 --out " + refs) == 0);
        REQUIRE(run_cli("train --features " + features + " --ref " + refs + " --out " + model +
                        " --trees 20 --max-depth 5 --seed 9" + threads_arg) == 0);
        REQUIRE(run_cli("predict --model " + model + " --features " + features + " --out " + pred) == 0);
        return std::vector<std::string>{slurp(net),     slurp(od),    slurp(routes), slurp(features),
                                        slurp(refs),    slurp(model), slurp(pred)};
    };
    const auto first = run_chain("a", 4);
    const auto second = run_chain("b", 1);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i] == second[i]);
    }
}

TEST_CASE("cli: evaluate reproduces the hand-computed report") {
    CliDir dir;
    {
        std::ofstream pred(dir.file("pred.csv"));
        pred << "pair_id,predicted_s\n0,110\n1,180\n";
        std::ofstream ref(dir.file("ref.csv"));
        ref << "pair_id,actual_s\n0,100\n1,200\n";
    }
    const std::string report = dir.file("report.json");
    REQUIRE(run_cli("evaluate --pred " + dir.file("pred.csv") + " --ref " + dir.file("ref.csv") +
                    " --out " + report) == 0);
    const std::string text = slurp(report);
    CHECK(text.find("\"mape_pct\": 10.0") != std::string::npos);
    CHECK(text.find("\"mae_s\": 15.0") != std::string::npos);
    CHECK(text.find("\"mse_s2\": 250.0") != std::string::npos);
    CHECK(text.find("\"delta_s\": -5.0") != std::string::npos);
    CHECK(text.find("\"apr\": 1.0") != std::string::npos);
    CHECK(text.find("\"r2\": 0.9") != std::string::npos);

    // A second prediction set enables the comparison block.
    {
        std::ofstream base(dir.file("base.csv"));
        base << "pair_id,predicted_s\n0,60\n1,120\n";
    }
    const std::string compared = dir.file("compared.json");
    REQUIRE(run_cli("evaluate --pred " + dir.file("pred.csv") + " --ref " + dir.file("ref.csv") +
                    " --baseline " + dir.file("base.csv") + " --out " + compared +
                    " --model-id rf --dataset-id sample") == 0);
    const std::string compared_text = slurp(compared);
    CHECK(compared_text.find("\"baseline\"") != std::string::npos);
    CHECK(compared_text.find("\"model_id\": \"rf\"") != std::string::npos);
    CHECK(compared_text.find("\"mape_pct\": 40.0") != std::string::npos);  // baseline error
}

TEST_CASE("cli: cv, tune and importance run end to end") {
    CliDir dir;
    const std::string net = dir.file("net.json");
    const std::string od = dir.file("od.csv");
    const std::string routes = dir.file("routes.jsonl");
    const std::string features = dir.file("features.csv");
    const std::string refs = dir.file("refs.csv");
    const std::string model = dir.file("model.json");

    REQUIRE(run_cli("synth-net --rows 4 --cols 4 --seed 2 --out " + net) == 0);
    REQUIRE(run_cli("sample-od --net " + net + " --count 50 --seed 1 --out " + od) == 0);
    REQUIRE(run_cli("route --net " + net + " --od " + od + " --out " + routes) == 0);
    REQUIRE(run_cli("features --net " + net + " --routes " + routes + " --out " + features) == 0);
    REQUIRE(run_cli("synth-ref --features " + features + " --seed 2 --out " + refs) == 0);
    REQUIRE(run_cli("train --features " + features + " --ref " + refs + " --out " + model +
                    " --trees 10 --max-depth 4 --seed 3") == 0);

    const std::string cv_out = dir.file("cv.json");
    REQUIRE(run_cli("cv --features " + features + " --ref " + refs +
                    " --folds 3 --trees 5 --max-depth 4 --cv-seed 4 --out " + cv_out) == 0);
    CHECK(slurp(cv_out).find("fold_mae_s") != std::string::npos);

    const std::string tune_out = dir.file("tune.json");
    REQUIRE(run_cli("tune --features " + features + " --ref " + refs + " --out " + tune_out +
                    " --trees 5 --max-depth 3,5 --budget 2 --folds 2 --seed 6") == 0);
    CHECK(slurp(tune_out).find("cv_mae") != std::string::npos);

    const std::string imp_out = dir.file("imp.json");
    REQUIRE(run_cli("importance --model " + model + " --out " + imp_out) == 0);
    CHECK(slurp(imp_out).find("naive_tt_s") != std::string::npos);
}

TEST_CASE("cli: sample-od honors a whitelist") {
    CliDir dir;
    const std::string net = dir.file("net.json");
    REQUIRE(run_cli("synth-net --rows 3 --cols 3 --seed 1 --out " + net) == 0);
    {
        std::ofstream whitelist(dir.file("wl.csv"));
        whitelist << "origin,destination\n0,8\n8,0\n";
    }
    const std::string od = dir.file("od.csv");
    REQUIRE(run_cli("sample-od --net " + net + " --count 10 --seed 2 --out " + od +
                    " --whitelist " + dir.file("wl.csv")) == 0);
    for (const ODPair& p : load_od_csv(od)) {
        const bool allowed = (p.origin == 0 && p.destination == 8) || (p.origin == 8 && p.destination == 0);
        CHECK(allowed);
    }
}
