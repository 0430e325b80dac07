#include "epimob/io.hpp"

#include "epimob/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace epimob::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_double(const std::string& cell) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw Error(ErrorKind::InvalidArgument, "cannot parse number '" + cell + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

std::size_t one_based(const json& v, std::size_t n, const char* what) {
    if (!v.is_number_integer())
        throw Error(ErrorKind::InvalidArgument, std::string(what) + ": node index must be an integer");
    const auto i = v.get<long long>();
    if (i < 1 || static_cast<std::size_t>(i) > n)
        throw Error(ErrorKind::InvalidArgument,
                    std::string(what) + ": node index " + std::to_string(i) + " outside 1..n");
    return static_cast<std::size_t>(i - 1);
}

std::size_t doc_size(const json& doc) {
    if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
        doc["n"].get<long long>() < 1)
        throw Error(ErrorKind::InvalidArgument, "graph document needs a positive integer 'n'");
    return static_cast<std::size_t>(doc["n"].get<long long>());
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON graph documents

json graph_to_json(const RegionGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.from + 1, e.to + 1});
    return {{"n", g.size()}, {"edges", edges}};
}

json generator_to_json(const GeneratorMatrix& g) {
    json doc = graph_to_json(g.graph());
    json rates = json::array();
    for (const Edge& e : g.graph().edges()) rates.push_back({e.from + 1, e.to + 1, g.rate(e.from, e.to)});
    doc["rates"] = rates;
    return doc;
}

RegionGraph graph_from_json(const json& doc) {
    const std::size_t n = doc_size(doc);
    std::vector<Edge> edges;
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) throw Error(ErrorKind::InvalidArgument, "'edges' must be an array");
        for (const auto& e : doc["edges"]) {
            if (!e.is_array() || e.size() != 2)
                throw Error(ErrorKind::InvalidArgument, "each edge must be [i, j]");
            edges.push_back({one_based(e[0], n, "edges"), one_based(e[1], n, "edges")});
        }
    }
    if (doc.contains("rates") && doc["rates"].is_array())
        for (const auto& r : doc["rates"])
            if (r.is_array() && r.size() == 3)
                edges.push_back({one_based(r[0], n, "rates"), one_based(r[1], n, "rates")});
    return RegionGraph(n, std::move(edges));
}

GeneratorMatrix generator_from_json(const json& doc) {
    const std::size_t n = doc_size(doc);
    if (!doc.contains("rates") || !doc["rates"].is_array())
        throw Error(ErrorKind::InvalidArgument, "generator document needs a 'rates' array");
    std::vector<Edge> edges;
    std::vector<double> rates;
    for (const auto& r : doc["rates"]) {
        if (!r.is_array() || r.size() != 3 || !r[2].is_number())
            throw Error(ErrorKind::InvalidArgument, "each rate must be [i, j, q]");
        edges.push_back({one_based(r[0], n, "rates"), one_based(r[1], n, "rates")});
        rates.push_back(r[2].get<double>());
    }
    if (doc.contains("edges")) {
        const RegionGraph listed = graph_from_json(json{{"n", n}, {"edges", doc["edges"]}});
        for (const Edge& e : listed.edges())
            if (std::find(edges.begin(), edges.end(), e) == edges.end())
                throw Error(ErrorKind::InvalidArgument,
                            "edge (" + std::to_string(e.from + 1) + "," + std::to_string(e.to + 1) +
                                ") has no rate");
    }
    return GeneratorMatrix::from_rates(n, edges, rates);
}

// ---------------------------------------------------------------------------
// CSV

void write_matrix_csv(std::ostream& os, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << format_double(m(i, j));
        }
        os << '\n';
    }
}

Matrix read_matrix_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split_csv_line(line)) row.push_back(parse_double(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(ErrorKind::InvalidArgument, "ragged matrix CSV");
        rows.push_back(std::move(row));
    }
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

TrajectoryTable to_table(const Trajectory& traj) {
    TrajectoryTable t;
    t.times = traj.times;
    for (const auto& s : traj.states) {
        t.p.push_back(s.p);
        t.x.push_back(s.x);
    }
    return t;
}

TrajectoryTable to_table(const PopulationTrajectory& traj) {
    TrajectoryTable t;
    t.times = traj.times;
    for (const Population& pop : traj.samples) {
        const auto n = static_cast<Eigen::Index>(pop.size());
        const auto total = static_cast<double>(pop.total());
        Vector p(n);
        Vector x(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const std::int64_t size = pop.s[kk] + pop.i[kk];
            p[k] = size > 0 ? static_cast<double>(pop.i[kk]) / static_cast<double>(size)
                            : std::numeric_limits<double>::quiet_NaN();
            x[k] = static_cast<double>(size) / total;
        }
        t.p.push_back(std::move(p));
        t.x.push_back(std::move(x));
    }
    return t;
}

TrajectoryTable to_table(const EnsembleResult& ens) {
    return {ens.times, ens.mean_p, ens.mean_x};
}

void write_trajectory_csv(std::ostream& os, const TrajectoryTable& table) {
    const std::size_t n = table.nodes();
    os << 't';
    for (std::size_t k = 1; k <= n; ++k) os << ",p_" << k;
    for (std::size_t k = 1; k <= n; ++k) os << ",x_" << k;
    os << '\n';
    for (std::size_t r = 0; r < table.times.size(); ++r) {
        os << format_double(table.times[r]);
        for (std::size_t k = 0; k < n; ++k) os << ',' << format_double(table.p[r][static_cast<Eigen::Index>(k)]);
        for (std::size_t k = 0; k < n; ++k) os << ',' << format_double(table.x[r][static_cast<Eigen::Index>(k)]);
        os << '\n';
    }
}

TrajectoryTable read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::InvalidArgument, "empty trajectory CSV");
    const auto header = split_csv_line(line);
    if (header.empty() || header.front() != "t" || header.size() % 2 != 1)
        throw Error(ErrorKind::InvalidArgument, "trajectory CSV header must be t,p_1..p_n,x_1..x_n");
    const std::size_t n = (header.size() - 1) / 2;
    for (std::size_t k = 1; k <= n; ++k)
        if (header[k] != "p_" + std::to_string(k) || header[n + k] != "x_" + std::to_string(k))
            throw Error(ErrorKind::InvalidArgument, "unexpected trajectory CSV column names");
    TrajectoryTable t;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error(ErrorKind::InvalidArgument, "trajectory CSV row has the wrong width");
        t.times.push_back(parse_double(cells[0]));
        Vector p(static_cast<Eigen::Index>(n));
        Vector x(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            p[static_cast<Eigen::Index>(k)] = parse_double(cells[1 + k]);
            x[static_cast<Eigen::Index>(k)] = parse_double(cells[1 + n + k]);
        }
        t.p.push_back(std::move(p));
        t.x.push_back(std::move(x));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

json report_to_json(const StabilityReport& r) {
    json j;
    j["mu"] = r.mu;
    j["r0"] = r.r0 ? json(*r.r0) : json(nullptr);
    j["lambda2"] = r.lambda2;
    j["m"] = r.m;
    j["m_lower"] = r.m_lower;
    j["verdict"] = std::string(to_string(r.verdict));
    j["condition_i"] = r.conditions.necessary_exit_rate;
    j["condition_ii"] = r.conditions.necessary_some_node;
    j["condition_iii"] = r.conditions.sufficient_every_node;
    j["condition_iv"] = r.conditions.sufficient_mobility;
    j["condition_iv_margin"] = r.conditions.mobility_margin;
    j["stationary_distribution"] = vector_json(r.v);
    j["perron_vector"] = vector_json(r.perron_vector);
    return j;
}

json endemic_to_json(const EndemicSolution& s) {
    return {{"p_star", vector_json(s.p_star)}, {"iterations", s.iterations}, {"residual", s.residual}};
}

std::string format_report(const StabilityReport& r) {
    std::ostringstream os;
    auto row = [&os](const char* name, const std::string& value) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-34s %s\n", name, value.c_str());
        os << buf;
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    auto yes = [](bool b) { return std::string(b ? "holds" : "fails"); };
    os << "stability report\n";
    row("mu(B - D - L*)", num(r.mu));
    row("R0 = rho((L* + D)^-1 B)", r.r0 ? num(*r.r0) : std::string("undefined (all delta = 0)"));
    row("lambda2", num(r.lambda2));
    row("m = min(delta - beta)", num(r.m));
    row("m_lower = -lambda2 / (4n + 1)", num(r.m_lower));
    row("(i)   delta_i > beta_i - nu_i", yes(r.conditions.necessary_exit_rate));
    row("(ii)  some delta_i >= beta_i", yes(r.conditions.necessary_some_node));
    row("(iii) all delta_i >= beta_i", yes(r.conditions.sufficient_every_node));
    row("(iv)  mobility bound", yes(r.conditions.sufficient_mobility) + " (margin " +
                                    num(r.conditions.mobility_margin) + ")");
    row("verdict", std::string(to_string(r.verdict)));
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

double nice_step(double range, int target_ticks) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    const double nice = frac <= 1.0 ? 1.0 : frac <= 2.0 ? 2.0 : frac <= 5.0 ? 5.0 : 10.0;
    return nice * mag;
}

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_svg(const TrajectoryTable& table, const PlotOptions& opts) {
    constexpr double width = 800, height = 500;
    constexpr double left = 70, right = 20, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double t0 = 0.0, t1 = 1.0, y0 = 0.0, y1 = 0.0;
    if (!table.times.empty()) {
        t0 = table.times.front();
        t1 = std::max(table.times.back(), t0 + 1e-12);
    }
    for (const auto& p : table.p)
        for (Eigen::Index k = 0; k < p.size(); ++k)
            if (std::isfinite(p[k])) y1 = std::max(y1, p[k]);
    if (!(y1 > 0.0)) y1 = 1.0;
    const double ystep = nice_step(y1, 5);
    y1 = std::ceil(y1 / ystep - 1e-9) * ystep;
    const double tstep = nice_step(t1 - t0, 8);

    auto sx = [&](double t) { return left + (t - t0) / (t1 - t0) * plot_w; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           << xml_escape(opts.title) << "</text>\n";
    os << "<g stroke=\"#000\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\"/>\n</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9 * tstep; t += tstep) {
        const double x = sx(t);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt(x) << "\" y2=\""
           << top + plot_h + 5 << "\" stroke=\"#000\"/>";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">"
           << tick_label(t) << "</text>\n";
    }
    for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
        const double py = sy(y);
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << left << "\" y2=\""
           << fmt(py) << "\" stroke=\"#000\"/>";
        os << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">"
           << tick_label(y) << "</text>\n";
    }
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\">time</text>\n";
    os << "<text transform=\"translate(18," << top + plot_h / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(opts.y_label) << "</text>\n";
    os << "</g>\n";

    const std::size_t n = table.nodes();
    for (std::size_t k = 0; k < n; ++k) {
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[k % 10] << "\" points=\"";
        bool first = true;
        for (std::size_t r = 0; r < table.times.size(); ++r) {
            const double v = table.p[r][static_cast<Eigen::Index>(k)];
            if (!std::isfinite(v)) continue;
            if (!first) os << ' ';
            os << fmt(sx(table.times[r])) << ',' << fmt(sy(v));
            first = false;
        }
        os << "\"><title>node " << k + 1 << "</title></polyline>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace epimob::io
