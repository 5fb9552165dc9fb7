#include "doctest.h"

#include "mbl/cli.hpp"
#include "mbl/config.hpp"
#include "mbl/errors.hpp"
#include "mbl/results_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace mbl;
namespace fs = std::filesystem;

namespace {

struct Run {
    int         code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int          code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream      in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mbl_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int &counter() {
        static int n = 0;
        return n;
    }
};

void check_snapshot(const std::string &name, const std::string &actual) {
    const fs::path file = fs::path(MBL_SNAPSHOT_DIR) / name;
    if(std::getenv("MBL_UPDATE_SNAPSHOTS")) spit(file, actual);
    REQUIRE_MESSAGE(fs::exists(file), "missing snapshot " << file);
    CHECK(slurp(file) == actual);
}

const char *small_config = R"({
  "physics": {"sizes": [6, 9], "ratio": "1/3", "environment": "neel"},
  "disorder": {"strengths": [0.5, 4.0], "realizations": 3, "seed": 5},
  "time_grid": {"window_points": 16}
})";

} // namespace

TEST_CASE("help output matches the snapshots") {
    const auto top = run({"--help"});
    CHECK(top.code == 0);
    check_snapshot("help.txt", top.out);
    for(const char *sub : {"trace", "sweep", "collapse", "validate-config"}) {
        const auto r = run({sub, "--help"});
        CHECK(r.code == 0);
        check_snapshot(std::string("help_") + sub + ".txt", r.out);
    }
}

TEST_CASE("usage errors exit with the config code") {
    CHECK(run({}).code == cli::exit_config_error);
    CHECK(run({"frobnicate"}).code == cli::exit_config_error);
    CHECK(run({"sweep", "--threads", "many"}).code == cli::exit_config_error);
    CHECK(run({"sweep"}).code == cli::exit_config_error);
}

TEST_CASE("missing config file names the path") {
    const auto r = run({"sweep", "--config", "/nonexistent/where.json"});
    CHECK(r.code == cli::exit_config_error);
    CHECK(r.err.find("/nonexistent/where.json") != std::string::npos);
    CHECK(run({"validate-config", "--config", "/nonexistent/where.json"}).code == cli::exit_config_error);
}

TEST_CASE("config errors point at the field or line") {
    TempDir tmp;
    spit(tmp.path / "empty_h.json", R"({"physics": {"sizes": [6]}, "disorder": {"strengths": []}})");
    auto r = run({"validate-config", "--config", (tmp.path / "empty_h.json").string()});
    CHECK(r.code == cli::exit_config_error);
    CHECK(r.err.find("disorder.strengths") != std::string::npos);

    spit(tmp.path / "typo.json", R"({"physics": {"sizes": [6], "sizs": [9]}, "disorder": {"strengths": [1]}})");
    r = run({"validate-config", "--config", (tmp.path / "typo.json").string()});
    CHECK(r.code == cli::exit_config_error);
    CHECK(r.err.find("physics.sizs") != std::string::npos);

    spit(tmp.path / "syntax.json", "{\n  \"physics\": {\n    \"sizes\": [6,]\n  }\n}\n");
    r = run({"validate-config", "--config", (tmp.path / "syntax.json").string()});
    CHECK(r.code == cli::exit_config_error);
    CHECK(r.err.find("syntax.json:3:") != std::string::npos);

    spit(tmp.path / "type.json", R"({"physics": {"sizes": [6], "exchange": "big"}, "disorder": {"strengths": [1]}})");
    r = run({"validate-config", "--config", (tmp.path / "type.json").string()});
    CHECK(r.code == cli::exit_config_error);
    CHECK(r.err.find("physics.exchange") != std::string::npos);

    spit(tmp.path / "ok.json", small_config);
    r = run({"validate-config", "--config", (tmp.path / "ok.json").string()});
    CHECK(r.code == cli::exit_ok);
    CHECK(r.out.find("config_hash=") != std::string::npos);
    CHECK(run({"sweep", "--config", (tmp.path / "ok.json").string(), "--env", "thermal"}).code ==
          cli::exit_config_error);
    CHECK(run({"sweep", "--config", (tmp.path / "ok.json").string(), "--sizes", "7"}).code ==
          cli::exit_config_error);
}

TEST_CASE("config hash ignores key order and run options but not physics") {
    const auto a = parse_config(R"({"disorder": {"seed": 1, "strengths": [1, 2]}, "physics": {"ratio": "1/3", "sizes": [6]}})");
    const auto b = parse_config(R"({"physics": {"sizes": [6], "ratio": "1/3"}, "run": {"threads": 8}, "disorder": {"strengths": [1, 2], "seed": 1}})");
    const auto c = parse_config(R"({"physics": {"sizes": [6], "ratio": "1/3"}, "disorder": {"strengths": [1, 2], "seed": 2}})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a).size() == 16);
    CHECK(b.threads == 8);

    // Defaults are filled in and survive a round trip through the resolved form.
    const auto resolved = to_json(a);
    CHECK(resolved["time_grid"]["window_points"] == 64);
    CHECK(resolved["analysis"]["beta_mode"] == "free");
    const auto again = parse_config(resolved.dump());
    CHECK(config_hash(again) == config_hash(a));
}

TEST_CASE("partial-failure threshold") {
    CHECK(cli::exit_code_for_failures(0.0) == cli::exit_ok);
    CHECK(cli::exit_code_for_failures(0.10) == cli::exit_ok);
    CHECK(cli::exit_code_for_failures(0.11) == cli::exit_partial_failure);
}

TEST_CASE("sweep reruns are byte-identical across thread counts") {
    TempDir tmp;
    spit(tmp.path / "c.json", small_config);
    const auto cfg = (tmp.path / "c.json").string();
    auto       a   = run({"sweep", "--config", cfg, "--out-dir", (tmp.path / "a").string(), "--threads", "1", "--quiet"});
    auto       b   = run({"sweep", "--config", cfg, "--out-dir", (tmp.path / "b").string(), "--threads", "3", "--quiet"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);

    std::size_t compared = 0;
    for(const auto &entry : fs::directory_iterator(tmp.path / "a")) {
        const auto name = entry.path().filename();
        if(name == "manifest.json") continue;
        CHECK(slurp(entry.path()) == slurp(tmp.path / "b" / name));
        ++compared;
    }
    CHECK(compared == 2 + 4);

    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "a" / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["config_hash"] == config_hash(load_config(cfg)));
    CHECK(manifest["outputs"].size() == 6);

    // The aggregate carries the config hash and can be read back.
    std::string hash;
    const auto  rows = io::read_aggregate_file(tmp.path / "a" / "aggregate.csv", &hash);
    CHECK(hash == manifest["config_hash"]);
    CHECK(rows.size() == 4);
}

TEST_CASE("trace writes one averaged table per size and disorder") {
    TempDir tmp;
    spit(tmp.path / "c.json", small_config);
    const auto r = run({"trace", "--config", (tmp.path / "c.json").string(), "--out-dir", (tmp.path / "t").string(),
                        "--sizes", "6", "--seed", "9", "--quiet"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(tmp.path / "t" / "trace_L6_l2_neel_h0.5.csv"));
    CHECK(fs::exists(tmp.path / "t" / "trace_L6_l2_neel_h4.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "t" / "trace_L9_l3_neel_h4.csv"));
    const auto text = slurp(tmp.path / "t" / "trace_L6_l2_neel_h4.csv");
    const auto row  = text.find("t,mean_R,stderr_R\n0,");
    REQUIRE(row != std::string::npos);
    CHECK(std::abs(std::stod(text.substr(row + 20)) - 1.0) <= 1e-9);
    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "t" / "manifest.json"));
    CHECK(manifest["config"]["disorder"]["seed"] == 9);
}

TEST_CASE("collapse on synthetic aggregate data") {
    TempDir tmp;
    std::vector<SteadyStateRecord> rows;
    for(int L : {6, 9, 12})
        for(double h = 1.5; h <= 5.5 + 1e-9; h += 0.25) {
            const double x = std::pow(L, 1.0 / 1.4) * (h - 3.2);
            rows.push_back({L, L / 3, h, EnvironmentKind::neel, 0.5 + 0.35 * std::tanh(0.3 * x), 0.01, 100});
        }
    std::ostringstream agg;
    io::write_aggregate(agg, "synthetic", rows);
    spit(tmp.path / "aggregate.csv", agg.str());
    spit(tmp.path / "analysis.json", R"({"physics": {"sizes": [6]}, "disorder": {"strengths": [1]}, "analysis": {"bootstrap": 5}})");

    const auto r = run({"collapse", (tmp.path / "aggregate.csv").string(), "--config", (tmp.path / "analysis.json").string(),
                        "--out-dir", (tmp.path / "fit").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto report = nlohmann::json::parse(slurp(tmp.path / "fit" / "collapse_fit.json"));
    CHECK(report["fit"]["beta_mode"] == "free");
    CHECK(report["alternate"]["beta_mode"] == "pinned");
    CHECK(std::abs(report["fit"]["params"]["h_c"].get<double>() - 3.2) <= 0.1);
    CHECK(std::abs(report["fit"]["params"]["nu"].get<double>() - 1.4) <= 0.15);
    CHECK(report["crossings"]["pairs"].size() == 3);
    CHECK(report["source_hash"] == "synthetic");
    CHECK(fs::exists(tmp.path / "fit" / "collapse_table.csv"));

    const auto pinned = run({"collapse", (tmp.path / "aggregate.csv").string(), "--config",
                             (tmp.path / "analysis.json").string(), "--out-dir", (tmp.path / "fit2").string(),
                             "--beta-mode", "pinned"});
    CHECK(pinned.code == 0);
    CHECK(nlohmann::json::parse(slurp(tmp.path / "fit2" / "collapse_fit.json"))["fit"]["params"]["beta"] == 0.0);

    // A single size cannot be collapsed.
    std::vector<SteadyStateRecord> one(rows.begin(), rows.begin() + 17);
    std::ostringstream             single;
    io::write_aggregate(single, "x", one);
    spit(tmp.path / "single.csv", single.str());
    const auto bad = run({"collapse", (tmp.path / "single.csv").string(), "--out-dir", (tmp.path / "fit3").string()});
    CHECK(bad.code == cli::exit_analysis_error);

    CHECK(run({"collapse", (tmp.path / "nope.csv").string()}).code == cli::exit_config_error);
}
