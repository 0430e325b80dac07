#include "epimob/equilibria.hpp"
#include "epimob/error.hpp"
#include "epimob/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef EPIMOB_SCENARIO_DIR
#define EPIMOB_SCENARIO_DIR "scenarios"
#endif

namespace epimob::app {

namespace fs = std::filesystem;

bool RunResult::checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "svg") return Format::svg;
    if (s == "json") return Format::json;
    if (s == "all") return Format::all;
    throw ConfigError("--format", "must be one of csv, svg, json, all");
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void write_file(const fs::path& path, const std::string& content, std::vector<fs::path>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    files.push_back(path);
}

double final_extreme(const io::TrajectoryTable& t, bool want_max) {
    double v = want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    const Vector& last = t.p.back();
    for (Eigen::Index k = 0; k < last.size(); ++k)
        if (std::isfinite(last[k])) v = want_max ? std::max(v, last[k]) : std::min(v, last[k]);
    return v;
}

std::vector<CheckOutcome> evaluate_checks(const ScenarioConfig& cfg, const RunResult& r) {
    std::vector<CheckOutcome> out;
    const Checks& c = cfg.checks;
    if (c.verdict) {
        const std::string got(to_string(r.report.verdict));
        out.push_back({"verdict", got == *c.verdict, "expected " + *c.verdict + ", got " + got});
    }
    if (c.condition_iv) {
        const bool got = r.report.conditions.sufficient_mobility;
        out.push_back({"condition_iv", got == *c.condition_iv,
                       std::string("condition (iv) ") + (got ? "holds" : "fails") + ", margin " +
                           num(r.report.conditions.mobility_margin)});
    }
    if (r.table.times.empty()) return out;  // analyze: nothing to check along a trajectory
    if (c.final_p_max_below) {
        const double v = final_extreme(r.table, true);
        out.push_back({"final_p_max_below", v < *c.final_p_max_below,
                       "max_i p_i(t_end) = " + num(v) + ", bound " + num(*c.final_p_max_below)});
    }
    if (c.final_p_min_above) {
        const double v = final_extreme(r.table, false);
        out.push_back({"final_p_min_above", v > *c.final_p_min_above,
                       "min_i p_i(t_end) = " + num(v) + ", bound " + num(*c.final_p_min_above)});
    }
    if (c.final_p_matches_endemic_within) {
        if (!r.endemic) {
            out.push_back({"final_p_matches_endemic_within", false, "no endemic solution"});
        } else {
            const double gap = (r.table.p.back() - r.endemic->p_star).cwiseAbs().maxCoeff();
            out.push_back({"final_p_matches_endemic_within", gap <= *c.final_p_matches_endemic_within,
                           "||p(t_end) - p*||_inf = " + num(gap)});
        }
    }
    if (c.final_x_matches_target_within) {
        const Vector target = cfg.mobility_target ? *cfg.mobility_target : r.report.v;
        const double gap = (r.table.x.back() - target).cwiseAbs().maxCoeff();
        out.push_back({"final_x_matches_target_within", gap <= *c.final_x_matches_target_within,
                       "||x(t_end) - target||_inf = " + num(gap)});
    }
    return out;
}

std::string provenance_note(const ScenarioConfig& cfg, const RunResult& r) {
    std::ostringstream os;
    os << "# " << cfg.name << "\n\n";
    if (!cfg.description.empty()) os << cfg.description << "\n\n";
    os << "## Assumed values\n\n";
    if (cfg.notes.empty()) os << "- none\n";
    for (const auto& n : cfg.notes) os << "- " << n << "\n";
    if (!cfg.derived.empty()) {
        os << "\n## Derived while loading\n\n";
        for (const auto& d : cfg.derived) os << "- " << d << "\n";
    }
    os << "\n## Parameters\n\n";
    os << "- n = " << cfg.generator.size() << "\n";
    os << "- beta = [" << cfg.params.beta().transpose().format(Eigen::IOFormat(6, 0, ", ")) << "]\n";
    os << "- delta = [" << cfg.params.delta().transpose().format(Eigen::IOFormat(6, 0, ", ")) << "]\n";
    os << "- t_end = " << cfg.t_end << ", dt = " << cfg.dt << "\n";
    if (cfg.mode == Mode::stochastic)
        os << "- replicas = " << cfg.replicas << ", population per node = " << cfg.population_per_node
           << ", method = " << to_string(cfg.method) << ", seed = " << cfg.seed << "\n";
    os << "\n## Analysis\n\n```\n" << io::format_report(r.report) << "```\n";
    os << "\n## Checks\n\n";
    if (r.checks.empty()) os << "- none\n";
    for (const auto& c : r.checks) os << "- " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    return os.str();
}

}  // namespace

RunResult run(const ScenarioConfig& cfg, const RunOptions& opts) {
    fs::create_directories(opts.out_dir);
    RunResult r;
    r.report = classify(cfg.params, cfg.generator);
    if (cfg.outputs.endemic_requested) {
        r.endemic = endemic_fixed_point(cfg.params, cfg.generator);  // NotEndemicRegime -> exit 4
    } else if (r.report.verdict == Verdict::EndemicStable && cfg.params.any_recovery()) {
        r.endemic = endemic_fixed_point(cfg.params, cfg.generator);
    }

    const std::uint64_t seed = opts.seed.value_or(cfg.seed);
    if (cfg.mode == Mode::deterministic) {
        IntegrationOptions io_opts;
        io_opts.t_end = cfg.t_end;
        io_opts.dt = cfg.dt;
        io_opts.output_stride =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.sample_interval / cfg.dt)));
        r.table = io::to_table(integrate(ModelState{cfg.p0, cfg.x0}, cfg.params, cfg.generator, io_opts));
    } else if (cfg.mode == Mode::stochastic) {
        const auto total = cfg.population_per_node * static_cast<std::int64_t>(cfg.generator.size());
        const Population pop0 = Population::from_fractions(cfg.p0, cfg.x0, total);
        EnsembleOptions e;
        e.method = cfg.method;
        e.t_end = cfg.t_end;
        e.dt = cfg.dt;
        e.sample_interval = cfg.sample_interval;
        e.replicas = cfg.replicas;
        e.seed = seed;
        e.threads = opts.threads;
        const auto runs = run_replicas(pop0, cfg.params, cfg.generator, e);
        r.table = io::to_table(ensemble_average(runs, seed));
    }

    const bool want_csv = opts.format == Format::csv || opts.format == Format::all;
    const bool want_svg = opts.format == Format::svg || opts.format == Format::all;
    const bool want_json = opts.format == Format::json || opts.format == Format::all || cfg.mode == Mode::analyze;
    if (!r.table.times.empty()) {
        if (want_csv) {
            std::ostringstream os;
            io::write_trajectory_csv(os, r.table);
            write_file(opts.out_dir / cfg.outputs.csv, os.str(), r.files);
        }
        if (want_svg) {
            io::PlotOptions plot;
            plot.title = cfg.description.empty() ? cfg.name : cfg.description;
            write_file(opts.out_dir / cfg.outputs.svg, io::render_svg(r.table, plot), r.files);
        }
    }
    if (want_json) {
        write_file(opts.out_dir / cfg.outputs.report, io::report_to_json(r.report).dump(2) + "\n", r.files);
        if (r.endemic)
            write_file(opts.out_dir / cfg.outputs.endemic, io::endemic_to_json(*r.endemic).dump(2) + "\n", r.files);
    }
    r.checks = evaluate_checks(cfg, r);
    if (opts.provenance)
        write_file(opts.out_dir / (cfg.name + "_provenance.md"), provenance_note(cfg, r), r.files);
    return r;
}

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names{"fig1a",     "fig1b",     "fig1c",         "fig1d", "fig2_line",
                                                "fig2_ring", "fig2_star", "fig2_complete", "fig3"};
    return names;
}

fs::path default_scenario_dir() {
    if (const char* env = std::getenv("EPIMOB_SCENARIO_DIR")) return env;
    return EPIMOB_SCENARIO_DIR;
}

RunResult reproduce(const std::string& figure, const fs::path& scenario_dir, RunOptions opts) {
    const auto& names = figure_names();
    if (std::find(names.begin(), names.end(), figure) == names.end())
        throw Error(ErrorKind::UnknownFigure, "unknown figure '" + figure + "'");
    opts.provenance = true;
    return run(load_scenario(scenario_dir / (figure + ".json")), opts);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::NoConvergence:
            case ErrorKind::SingularMMatrix:
            case ErrorKind::SingularSystem:
            case ErrorKind::StateEscapedBox:
            case ErrorKind::DegenerateSolution:
            case ErrorKind::StepTooLarge:
                return 3;
            case ErrorKind::NotEndemicRegime:
                return 4;
            default:
                return 2;
        }
    }
    return 1;
}

}  // namespace epimob::app
