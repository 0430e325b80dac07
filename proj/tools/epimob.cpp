// epimob: run, analyze and reproduce SIS-with-mobility scenarios.

#include "epimob/error.hpp"
#include "epimob/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace epimob;

void print_result(const std::string& name, const app::RunResult& r) {
    std::cout << "== " << name << "\n" << io::format_report(r.report);
    if (r.endemic) {
        std::cout << "endemic p*            ";
        for (Eigen::Index i = 0; i < r.endemic->p_star.size(); ++i)
            std::cout << (i ? " " : "") << io::format_double(r.endemic->p_star[i]);
        std::cout << "\n";
    }
    for (const auto& c : r.checks)
        std::cout << (c.passed ? "check PASS " : "check FAIL ") << c.name << ": " << c.detail << "\n";
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Deterministic and stochastic SIS epidemics on mobility networks"};
    cli.require_subcommand(1);

    std::string scenario;
    std::string figure;
    std::string out_dir = ".";
    std::string format = "all";
    std::string scenario_dir = app::default_scenario_dir().string();
    std::uint64_t seed = 0;
    std::size_t threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
        sub->add_option("--format", format, "Outputs to write")
            ->check(CLI::IsMember({"csv", "svg", "json", "all"}))
            ->capture_default_str();
    };

    auto* run = cli.add_subcommand("run", "Run a scenario file");
    run->add_option("--scenario", scenario, "Scenario JSON")->required();
    add_common(run);
    auto* run_seed = run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--threads", threads, "Replica worker threads (0 = hardware)");

    auto* analyze = cli.add_subcommand("analyze", "Stability analysis only");
    analyze->add_option("--scenario", scenario, "Scenario JSON")->required();
    add_common(analyze);

    auto* repro = cli.add_subcommand("reproduce", "Regenerate a bundled figure");
    repro->add_option("--figure", figure, "Figure name or 'all'")->required();
    repro->add_option("--scenario-dir", scenario_dir, "Bundled scenario directory")->capture_default_str();
    add_common(repro);
    auto* repro_seed = repro->add_option("--seed", seed, "Override the scenario seed");
    repro->add_option("--threads", threads, "Replica worker threads (0 = hardware)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        app::RunOptions opts;
        opts.out_dir = out_dir;
        opts.format = app::parse_format(format);
        opts.threads = threads;
        if ((run_seed && run_seed->count()) || (repro_seed && repro_seed->count())) opts.seed = seed;

        bool ok = true;
        if (*run) {
            const auto cfg = app::load_scenario(scenario);
            const auto r = app::run(cfg, opts);
            print_result(cfg.name, r);
            ok = r.checks_passed();
        } else if (*analyze) {
            auto cfg = app::load_scenario(scenario);
            cfg.mode = app::Mode::analyze;
            const auto r = app::run(cfg, opts);
            print_result(cfg.name, r);
        } else {
            std::vector<std::string> figures{figure};
            if (figure == "all") figures = app::figure_names();
            for (const auto& f : figures) {
                const auto r = app::reproduce(f, scenario_dir, opts);
                print_result(f, r);
                ok = ok && r.checks_passed();
            }
        }
        if (!ok) {
            std::cerr << "error: scenario checks failed\n";
            return 3;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return app::exit_code_for(e);
    }
}
