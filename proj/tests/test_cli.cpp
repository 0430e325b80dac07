#include "epimob/error.hpp"
#include "epimob/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace epimob;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("epimob_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

io::json minimal() {
    return io::json::parse(R"({
        "schema": 1, "name": "mini",
        "graph": {"kind": "ring", "n": 4},
        "rates": {"kind": "uniform_out", "nu": 0.2},
        "beta": 0.5, "delta": 0.2, "t_end": 5, "sample_interval": 1
    })");
}

std::string config_error_path(const io::json& doc) {
    try {
        app::parse_scenario(doc);
    } catch (const app::ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

struct Proc {
    int code;
    std::string output;
};

Proc run_cli(const std::string& args, const fs::path& dir) {
    const auto log = dir / "cli.log";
    const std::string cmd = std::string(EPIMOB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

void write_json(const fs::path& path, const io::json& doc) { std::ofstream(path) << doc.dump(2); }

}  // namespace

TEST_CASE("scenario validation names the offending field") {
    auto doc = minimal();
    CHECK(config_error_path(doc) == "<accepted>");
    doc["delta"] = {0.1, 0.2};
    CHECK(config_error_path(doc) == "delta");
    doc = minimal();
    doc["detla"] = 0.1;
    CHECK(config_error_path(doc) == "detla");
    doc = minimal();
    doc["graph"]["kind"] = "torus";
    CHECK(config_error_path(doc) == "graph.kind");
    doc = minimal();
    doc["schema"] = 2;
    CHECK(config_error_path(doc) == "schema");
    doc = minimal();
    doc["rates"]["nu"] = -1.0;
    CHECK(config_error_path(doc).rfind("rates", 0) == 0);
    doc = minimal();
    doc["checks"] = {{"verdict", "Maybe"}};
    CHECK(config_error_path(doc) == "checks.verdict");
    doc = minimal();
    doc.erase("beta");
    CHECK(config_error_path(doc) == "beta");
}

TEST_CASE("scenario defaults and derived rates") {
    const auto cfg = app::parse_scenario(minimal());
    CHECK(cfg.generator.size() == 4);
    CHECK(cfg.p0[0] == doctest::Approx(0.01));
    CHECK((cfg.x0.array() - 0.25).abs().maxCoeff() <= 1e-15);
    CHECK(cfg.mode == app::Mode::deterministic);

    auto doc = minimal();
    doc["graph"] = {{"kind", "complete"}, {"n", 20}};
    doc["beta"] = 0.3;
    doc["delta"] = {{"mobility_condition", {{"m_factor", 0.8}, {"pinned", {1, 20}}}}};
    const auto fig3 = app::parse_scenario(doc);
    CHECK(std::abs(fig3.params.delta()[0] - 0.2979) <= 1e-4);
    CHECK(std::abs(fig3.params.delta()[5] - 0.3198) <= 2e-4);
    CHECK_FALSE(fig3.derived.empty());
}

TEST_CASE("exit codes by error class") {
    CHECK(app::exit_code_for(app::ConfigError("delta", "bad")) == 2);
    CHECK(app::exit_code_for(Error(ErrorKind::NoConvergence, "x")) == 3);
    CHECK(app::exit_code_for(Error(ErrorKind::StateEscapedBox, "x")) == 3);
    CHECK(app::exit_code_for(Error(ErrorKind::NotEndemicRegime, "x")) == 4);
    CHECK(app::exit_code_for(Error(ErrorKind::UnknownFigure, "x")) == 2);
    CHECK(app::exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("runner writes the requested formats") {
    const auto dir = scratch("formats");
    app::RunOptions opts;
    opts.out_dir = dir;
    opts.format = app::Format::csv;
    auto r = app::run(app::parse_scenario(minimal()), opts);
    CHECK(fs::exists(dir / "mini.csv"));
    CHECK_FALSE(fs::exists(dir / "mini.svg"));
    CHECK(r.table.times.size() == 6);
    opts.format = app::Format::all;
    r = app::run(app::parse_scenario(minimal()), opts);
    CHECK(fs::exists(dir / "mini.svg"));
    CHECK(fs::exists(dir / "mini_report.json"));
    CHECK(fs::exists(dir / "mini_endemic.json"));
}

TEST_CASE("command line: run, analyze, reproduce and failures") {
    const auto dir = scratch("cli");
    const auto good = dir / "good.json";
    write_json(good, minimal());

    auto p = run_cli("run --scenario " + good.string() + " --out-dir " + dir.string(), dir);
    CHECK(p.code == 0);
    CHECK(fs::exists(dir / "mini.csv"));
    CHECK(fs::exists(dir / "mini.svg"));

    auto bad = minimal();
    bad["delta"] = {0.1, 0.2, 0.3};
    write_json(dir / "bad.json", bad);
    p = run_cli("run --scenario " + (dir / "bad.json").string() + " --out-dir " + dir.string(), dir);
    CHECK(p.code == 2);
    CHECK(p.output.find("delta") != std::string::npos);

    auto fig3 = minimal();
    fig3["name"] = "complete";
    fig3["graph"] = {{"kind", "complete"}, {"n", 20}};
    fig3["beta"] = 0.3;
    fig3["delta"] = {{"mobility_condition", {{"m_factor", 0.8}, {"pinned", {1, 20}}}}};
    write_json(dir / "complete.json", fig3);
    p = run_cli("analyze --scenario " + (dir / "complete.json").string() + " --out-dir " + dir.string(), dir);
    CHECK(p.code == 0);
    std::ifstream in(dir / "complete_report.json");
    const auto report = io::json::parse(in);
    CHECK(std::abs(report["lambda2"].get<double>() - 0.2105) <= 1e-4);
    CHECK(report["condition_iv"] == true);

    auto regime = fig3;
    regime["outputs"] = {{"endemic", "e.json"}};
    write_json(dir / "regime.json", regime);
    p = run_cli("run --scenario " + (dir / "regime.json").string() + " --out-dir " + dir.string(), dir);
    CHECK(p.code == 4);

    p = run_cli("reproduce --figure fig9 --out-dir " + dir.string(), dir);
    CHECK(p.code == 2);
    p = run_cli("reproduce --figure fig3 --out-dir " + dir.string(), dir);
    CHECK(p.code == 0);
    CHECK(fs::exists(dir / "fig3.csv"));
    CHECK(fs::exists(dir / "fig3.svg"));
    CHECK(fs::exists(dir / "fig3_provenance.md"));

    p = run_cli("run --scenario " + good.string() + " --format pdf", dir);
    CHECK(p.code == 2);
}

TEST_CASE("stochastic output is byte-identical for identical seeds") {
    const auto dir = scratch("seed");
    auto doc = minimal();
    doc["mode"] = "stochastic";
    doc["replicas"] = 4;
    doc["population_per_node"] = 200;
    write_json(dir / "s.json", doc);
    auto read = [](const fs::path& f) {
        std::ifstream in(f);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(run_cli("run --scenario " + (dir / "s.json").string() + " --seed 9 --format csv --out-dir " + (dir / "a").string(), dir).code == 0);
    CHECK(run_cli("run --scenario " + (dir / "s.json").string() + " --seed 9 --format csv --out-dir " + (dir / "b").string(), dir).code == 0);
    CHECK(run_cli("run --scenario " + (dir / "s.json").string() + " --seed 10 --format csv --out-dir " + (dir / "c").string(), dir).code == 0);
    CHECK(read(dir / "a" / "mini.csv") == read(dir / "b" / "mini.csv"));
    CHECK(read(dir / "a" / "mini.csv") != read(dir / "c" / "mini.csv"));
}
