#pragma once

// Scenario files and the command-line runner behind tools/epimob.
//
// A scenario is a JSON document with "schema": 1. Unknown keys are rejected
// with the offending field path.

#include "epimob/dynamics.hpp"
#include "epimob/io.hpp"
#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"
#include "epimob/stochastic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace epimob::app {

/// Invalid scenario content; `path` names the field, e.g. "delta" or "graph.kind".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class Mode { deterministic, stochastic, analyze };

struct OutputNames {
    std::string csv;
    std::string svg;
    std::string report;
    std::string endemic;
    bool endemic_requested = false;  // set explicitly in the file
};

/// Figure-level outcomes a scenario asserts about its own run.
struct Checks {
    std::optional<std::string> verdict;
    std::optional<bool> condition_iv;
    std::optional<double> final_p_max_below;
    std::optional<double> final_p_min_above;
    std::optional<double> final_p_matches_endemic_within;
    std::optional<double> final_x_matches_target_within;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    std::vector<std::string> notes;
    std::vector<std::string> derived;  // values computed while loading
    GeneratorMatrix generator;
    std::optional<Vector> mobility_target;  // Metropolis-Hastings target, if used
    EpidemicParams params;
    Vector p0;
    Vector x0;
    Mode mode = Mode::deterministic;
    double t_end = 200.0;
    double dt = 0.01;
    double sample_interval = 0.1;
    std::size_t replicas = 20;
    std::int64_t population_per_node = 1000;
    std::uint64_t seed = 1;
    StochasticMethod method = StochasticMethod::fixed_step;
    OutputNames outputs;
    Checks checks;
};

ScenarioConfig parse_scenario(const io::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

enum class Format { csv, svg, json, all };
Format parse_format(const std::string& s);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    Format format = Format::all;
    bool provenance = false;  // write <name>_provenance.md
    std::size_t threads = 0;
};

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    std::vector<std::filesystem::path> files;
    StabilityReport report;
    std::optional<EndemicSolution> endemic;
    io::TrajectoryTable table;  // primary trajectory (empty for analyze)
    std::vector<CheckOutcome> checks;

    bool checks_passed() const;
};

RunResult run(const ScenarioConfig& config, const RunOptions& opts);

/// Names accepted by reproduce().
const std::vector<std::string>& figure_names();

/// Directory holding the bundled figure scenarios.
std::filesystem::path default_scenario_dir();

RunResult reproduce(const std::string& figure, const std::filesystem::path& scenario_dir,
                    RunOptions opts);

/// Exit status for an exception escaping run(): 2 config, 3 numerical, 4 regime, 1 other.
int exit_code_for(const std::exception& e);

}  // namespace epimob::app
