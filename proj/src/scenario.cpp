#include "epimob/scenario.hpp"

#include "epimob/equilibria.hpp"
#include "epimob/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace epimob::app {

using io::json;

namespace {

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    return v.get<double>();
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

/// Scalar broadcast to n entries, or an array of exactly n numbers.
Vector per_node(const json& v, std::size_t n, const std::string& path) {
    const auto nn = static_cast<Eigen::Index>(n);
    if (v.is_number()) return Vector::Constant(nn, v.get<double>());
    if (!v.is_array()) throw ConfigError(path, "must be a number or an array of numbers");
    if (v.size() != n)
        throw ConfigError(path, "has length " + std::to_string(v.size()) + ", expected n = " +
                                    std::to_string(n));
    Vector out(nn);
    for (std::size_t k = 0; k < n; ++k)
        out[static_cast<Eigen::Index>(k)] = number(v[k], path + "[" + std::to_string(k) + "]");
    return out;
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

struct MobilityPart {
    GeneratorMatrix generator;
    std::optional<Vector> target;
};

MobilityPart parse_mobility(const json& doc, std::vector<std::string>& derived) {
    if (!doc.contains("graph")) throw ConfigError("graph", "missing");
    const json& graph = doc["graph"];
    const bool by_kind = graph.is_object() && graph.contains("kind");
    if (by_kind) allow_keys(graph, "graph", {"kind", "n"});
    else allow_keys(graph, "graph", {"n", "edges", "rates"});
    if (!graph.contains("n")) throw ConfigError("graph.n", "missing");
    const auto n = static_cast<std::size_t>(unsigned_int(graph["n"], "graph.n"));

    std::optional<RegionGraph> region;
    if (by_kind) {
        if (!graph["kind"].is_string()) throw ConfigError("graph.kind", "must be a string");
        const auto kind = rethrow_as_config("graph.kind",
                                            [&] { return parse_graph_kind(graph["kind"].get<std::string>()); });
        region = rethrow_as_config("graph", [&] { return make_graph(kind, n); });
    } else if (graph.contains("rates")) {
        if (doc.contains("rates"))
            throw ConfigError("rates", "graph document already lists explicit rates");
        auto g = rethrow_as_config("graph", [&] { return io::generator_from_json(graph); });
        return {std::move(g), std::nullopt};
    } else {
        region = rethrow_as_config("graph", [&] { return io::graph_from_json(graph); });
    }

    if (!doc.contains("rates")) throw ConfigError("rates", "missing");
    const json& rates = doc["rates"];
    if (!rates.is_object() || !rates.contains("kind") || !rates["kind"].is_string())
        throw ConfigError("rates.kind", "missing");
    const std::string kind = rates["kind"].get<std::string>();
    if (kind == "uniform_out") {
        allow_keys(rates, "rates", {"kind", "nu"});
        if (!rates.contains("nu")) throw ConfigError("rates.nu", "missing");
        const Vector nu = per_node(rates["nu"], n, "rates.nu");
        auto g = rethrow_as_config("rates", [&] { return uniform_out_rates(*region, nu); });
        return {std::move(g), std::nullopt};
    }
    if (kind == "metropolis_hastings") {
        allow_keys(rates, "rates", {"kind", "target", "base_rate"});
        if (!rates.contains("base_rate")) throw ConfigError("rates.base_rate", "missing");
        const double base = number(rates["base_rate"], "rates.base_rate");
        Vector target = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
        if (rates.contains("target") && !(rates["target"].is_string() && rates["target"] == "uniform")) {
            target = per_node(rates["target"], n, "rates.target");
            const double sum = target.sum();
            if (!(sum > 0.0)) throw ConfigError("rates.target", "must have a positive sum");
            target /= sum;
        } else {
            derived.push_back("Metropolis-Hastings target distribution: uniform");
        }
        auto g = rethrow_as_config("rates", [&] { return metropolis_hastings_rates(*region, target, base); });
        return {std::move(g), target};
    }
    throw ConfigError("rates.kind", "unknown rate assignment '" + kind + "'");
}

Vector parse_delta(const json& v, const Vector& beta, const GeneratorMatrix& g,
                   std::vector<std::string>& derived) {
    const std::size_t n = g.size();
    if (!v.is_object()) return per_node(v, n, "delta");
    allow_keys(v, "delta", {"mobility_condition"});
    if (!v.contains("mobility_condition")) throw ConfigError("delta.mobility_condition", "missing");
    const json& rule = v["mobility_condition"];
    allow_keys(rule, "delta.mobility_condition", {"m_factor", "pinned"});
    if (!rule.contains("m_factor")) throw ConfigError("delta.mobility_condition.m_factor", "missing");
    const double factor = number(rule["m_factor"], "delta.mobility_condition.m_factor");
    std::vector<std::size_t> pinned;
    if (!rule.contains("pinned") || !rule["pinned"].is_array())
        throw ConfigError("delta.mobility_condition.pinned", "must be an array of node indices");
    for (const auto& p : rule["pinned"]) {
        const auto idx = unsigned_int(p, "delta.mobility_condition.pinned");
        if (idx < 1 || idx > n) throw ConfigError("delta.mobility_condition.pinned", "index outside 1..n");
        pinned.push_back(static_cast<std::size_t>(idx - 1));
    }
    const double m_lower = rethrow_as_config("delta", [&] { return m_lower_bound(g); });
    const double m = factor * m_lower;
    Vector delta = rethrow_as_config(
        "delta.mobility_condition", [&] { return recovery_rates_for_mobility_condition(beta, g, m, pinned); });
    std::ostringstream os;
    os << "delta from the lambda2 sufficient condition at equality: m_lower = " << m_lower
       << ", m = " << factor << " * m_lower = " << m;
    derived.push_back(os.str());
    return delta;
}

OutputNames parse_outputs(const json& doc, const std::string& name) {
    OutputNames out{name + ".csv", name + ".svg", name + "_report.json", name + "_endemic.json", false};
    if (!doc.contains("outputs")) return out;
    const json& o = doc["outputs"];
    allow_keys(o, "outputs", {"csv", "svg", "report", "endemic"});
    auto str = [&](const char* key, std::string& dst) {
        if (!o.contains(key)) return false;
        if (!o[key].is_string()) throw ConfigError(join("outputs", key), "must be a string");
        dst = o[key].get<std::string>();
        return true;
    };
    str("csv", out.csv);
    str("svg", out.svg);
    str("report", out.report);
    out.endemic_requested = str("endemic", out.endemic);
    return out;
}

Checks parse_checks(const json& doc) {
    Checks c;
    if (!doc.contains("checks")) return c;
    const json& j = doc["checks"];
    allow_keys(j, "checks",
               {"verdict", "condition_iv", "final_p_max_below", "final_p_min_above",
                "final_p_matches_endemic_within", "final_x_matches_target_within"});
    if (j.contains("verdict")) {
        if (!j["verdict"].is_string()) throw ConfigError("checks.verdict", "must be a string");
        c.verdict = j["verdict"].get<std::string>();
        if (*c.verdict != "DiseaseFreeStable" && *c.verdict != "EndemicStable")
            throw ConfigError("checks.verdict", "must be DiseaseFreeStable or EndemicStable");
    }
    if (j.contains("condition_iv")) {
        if (!j["condition_iv"].is_boolean()) throw ConfigError("checks.condition_iv", "must be a boolean");
        c.condition_iv = j["condition_iv"].get<bool>();
    }
    auto opt = [&](const char* key, std::optional<double>& dst) {
        if (j.contains(key)) dst = number(j[key], join("checks", key));
    };
    opt("final_p_max_below", c.final_p_max_below);
    opt("final_p_min_above", c.final_p_min_above);
    opt("final_p_matches_endemic_within", c.final_p_matches_endemic_within);
    opt("final_x_matches_target_within", c.final_x_matches_target_within);
    return c;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
    allow_keys(doc, "",
               {"schema", "name", "description", "notes", "graph", "rates", "beta", "delta", "p0", "x0",
                "mode", "t_end", "dt", "sample_interval", "replicas", "population_per_node", "seed",
                "stochastic_method", "outputs", "checks"});
    if (!doc.contains("schema")) throw ConfigError("schema", "missing");
    if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1)
        throw ConfigError("schema", "unsupported schema version (expected 1)");

    std::string name = "scenario";
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ConfigError("name", "must be a string");
        name = doc["name"].get<std::string>();
    }
    std::string description;
    if (doc.contains("description")) {
        if (!doc["description"].is_string()) throw ConfigError("description", "must be a string");
        description = doc["description"].get<std::string>();
    }
    std::vector<std::string> notes;
    if (doc.contains("notes")) {
        if (!doc["notes"].is_array()) throw ConfigError("notes", "must be an array of strings");
        for (const auto& s : doc["notes"]) {
            if (!s.is_string()) throw ConfigError("notes", "must be an array of strings");
            notes.push_back(s.get<std::string>());
        }
    }

    std::vector<std::string> derived;
    MobilityPart mobility = parse_mobility(doc, derived);
    const GeneratorMatrix& g = mobility.generator;
    const std::size_t n = g.size();
    if (!is_irreducible(g)) throw ConfigError("graph", "mobility graph is not strongly connected");

    if (!doc.contains("beta")) throw ConfigError("beta", "missing");
    if (!doc.contains("delta")) throw ConfigError("delta", "missing");
    const Vector beta = per_node(doc["beta"], n, "beta");
    const Vector delta = parse_delta(doc["delta"], beta, g, derived);
    EpidemicParams params = rethrow_as_config("beta", [&] { return EpidemicParams(beta, delta); });

    Vector p0 = Vector::Constant(static_cast<Eigen::Index>(n), 0.01);
    if (doc.contains("p0")) p0 = per_node(doc["p0"], n, "p0");
    for (Eigen::Index k = 0; k < p0.size(); ++k)
        if (!(p0[k] >= 0.0 && p0[k] <= 1.0)) throw ConfigError("p0", "entries must lie in [0, 1]");

    Vector x0 = stationary_distribution(g).values();
    if (doc.contains("x0")) {
        const json& x = doc["x0"];
        if (x.is_string() && x == "uniform") {
            x0 = PopulationDistribution::uniform(n).values();
        } else if (!(x.is_string() && x == "stationary")) {
            x0 = per_node(x, n, "x0");
            const double sum = x0.sum();
            if (!(sum > 0.0)) throw ConfigError("x0", "must have a positive sum");
            x0 /= sum;
            rethrow_as_config("x0", [&] { return PopulationDistribution(x0); });
        }
    }

    Mode mode = Mode::deterministic;
    if (doc.contains("mode")) {
        const auto& m = doc["mode"];
        if (m == "deterministic") mode = Mode::deterministic;
        else if (m == "stochastic") mode = Mode::stochastic;
        else if (m == "analyze") mode = Mode::analyze;
        else throw ConfigError("mode", "must be deterministic, stochastic or analyze");
    }

    ScenarioConfig cfg{
        .name = name,
        .description = description,
        .notes = std::move(notes),
        .derived = std::move(derived),
        .generator = std::move(mobility.generator),
        .mobility_target = std::move(mobility.target),
        .params = std::move(params),
        .p0 = std::move(p0),
        .x0 = std::move(x0),
        .mode = mode,
        .outputs = parse_outputs(doc, name),
        .checks = parse_checks(doc),
    };
    if (doc.contains("t_end")) cfg.t_end = number(doc["t_end"], "t_end");
    if (doc.contains("dt")) cfg.dt = number(doc["dt"], "dt");
    if (doc.contains("sample_interval")) cfg.sample_interval = number(doc["sample_interval"], "sample_interval");
    if (doc.contains("replicas")) cfg.replicas = unsigned_int(doc["replicas"], "replicas");
    if (doc.contains("population_per_node"))
        cfg.population_per_node = static_cast<std::int64_t>(unsigned_int(doc["population_per_node"], "population_per_node"));
    if (doc.contains("seed")) cfg.seed = unsigned_int(doc["seed"], "seed");
    if (doc.contains("stochastic_method")) {
        if (!doc["stochastic_method"].is_string()) throw ConfigError("stochastic_method", "must be a string");
        cfg.method = rethrow_as_config("stochastic_method", [&] {
            return parse_stochastic_method(doc["stochastic_method"].get<std::string>());
        });
    }
    if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end", "must be nonnegative");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(cfg.sample_interval >= cfg.dt)) throw ConfigError("sample_interval", "must be at least dt");
    if (cfg.replicas == 0) throw ConfigError("replicas", "must be positive");
    if (cfg.population_per_node <= 0) throw ConfigError("population_per_node", "must be positive");
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

}  // namespace epimob::app
