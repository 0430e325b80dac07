#pragma once

// File formats:
//   graph/generator JSON  { "n": int, "edges": [[i,j],...], "rates": [[i,j,q],...] }  (1-based)
//   matrix CSV            row-major, %.17g
//   trajectory CSV        header t,p_1..p_n,x_1..x_n, %.17g
//   StabilityReport and EndemicSolution JSON
//   static SVG line chart of p_i(t)

#include "epimob/dynamics.hpp"
#include "epimob/equilibria.hpp"
#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"
#include "epimob/stochastic.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace epimob::io {

using nlohmann::json;

/// %.17g rendering; "nan" for NaN.
std::string format_double(double v);

json graph_to_json(const RegionGraph& g);
json generator_to_json(const GeneratorMatrix& g);
RegionGraph graph_from_json(const json& doc);
/// Requires a "rates" array; edges listed without a rate are an error.
GeneratorMatrix generator_from_json(const json& doc);

void write_matrix_csv(std::ostream& os, const Matrix& m);
Matrix read_matrix_csv(std::istream& is);

/// Column-oriented view of any trajectory, the common CSV schema.
struct TrajectoryTable {
    std::vector<double> times;
    std::vector<Vector> p;
    std::vector<Vector> x;

    std::size_t nodes() const { return p.empty() ? 0 : static_cast<std::size_t>(p.front().size()); }
};

TrajectoryTable to_table(const Trajectory& traj);
/// Fractions from counts: p_k = i_k / (s_k + i_k) (NaN when empty), x_k = (s_k + i_k) / N.
TrajectoryTable to_table(const PopulationTrajectory& traj);
TrajectoryTable to_table(const EnsembleResult& ens);

void write_trajectory_csv(std::ostream& os, const TrajectoryTable& table);
TrajectoryTable read_trajectory_csv(std::istream& is);

json report_to_json(const StabilityReport& r);
json endemic_to_json(const EndemicSolution& s);

/// Fixed-order human-readable table of a StabilityReport.
std::string format_report(const StabilityReport& r);

struct PlotOptions {
    std::string title;
    std::string y_label = "infected fraction p_i(t)";
};

/// Self-contained SVG (viewBox 0 0 800 500), one polyline per node.
std::string render_svg(const TrajectoryTable& table, const PlotOptions& opts = {});

}  // namespace epimob::io
