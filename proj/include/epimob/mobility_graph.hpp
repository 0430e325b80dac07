#pragma once

// Mobility networks: region graphs, CTMC generator matrices, stationary
// occupancy and the occupancy-dependent mobility Laplacian.
//
// Node indices are 0-based in the API. The JSON/CSV surfaces in io.hpp use
// 1-based indices.

#include "epimob/types.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace epimob {

struct Edge {
    std::size_t from;
    std::size_t to;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed graph over regions. Self-loops are rejected; duplicates are
/// collapsed and the edge list is kept sorted.
class RegionGraph {
public:
    RegionGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool has_edge(std::size_t from, std::size_t to) const;
    std::size_t out_degree(std::size_t node) const { return out_degree_[node]; }
    bool is_symmetric() const;
    bool is_strongly_connected() const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_degree_;
};

enum class GraphKind { line, ring, star, complete };

GraphKind parse_graph_kind(std::string_view name);
std::string_view to_string(GraphKind kind);

/// Bidirectional topology; the star hub is node 0.
RegionGraph make_graph(GraphKind kind, std::size_t n);

/// Validated CTMC transition-rate matrix: q_ij >= 0 off the diagonal and
/// q_ii = -sum_{j != i} q_ij.
class GeneratorMatrix {
public:
    /// Checks the sign pattern and zero row sums (relative tolerance 1e-12).
    static GeneratorMatrix validate(Matrix q);

    /// Builds a generator from off-diagonal rates; the diagonal is filled in
    /// so that every row sums to zero.
    static GeneratorMatrix from_rates(std::size_t n, const std::vector<Edge>& edges,
                                      const std::vector<double>& rates);

    std::size_t size() const noexcept { return static_cast<std::size_t>(q_.rows()); }
    const Matrix& q() const noexcept { return q_; }
    /// Row-major copy of Q^T, used by the x dynamics.
    const Matrix& qt() const noexcept { return qt_; }
    double rate(std::size_t i, std::size_t j) const { return q_(i, j); }
    /// nu_i, total rate out of node i.
    double exit_rate(std::size_t i) const { return -q_(i, i); }
    /// Graph of strictly positive off-diagonal rates.
    const RegionGraph& graph() const noexcept { return graph_; }

private:
    explicit GeneratorMatrix(Matrix q);

    Matrix q_;
    Matrix qt_;
    RegionGraph graph_;
};

bool is_irreducible(const GeneratorMatrix& g);

/// Population fractions: strictly positive, summing to one.
class PopulationDistribution {
public:
    /// Validates positivity and |sum - 1| <= 1e-12.
    explicit PopulationDistribution(Vector x);
    static PopulationDistribution uniform(std::size_t n);

    std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }
    const Vector& values() const noexcept { return x_; }
    double operator[](std::size_t i) const { return x_[static_cast<Eigen::Index>(i)]; }

private:
    Vector x_;
};

/// L(x), row sums zero, nonpositive off-diagonals.
class MobilityLaplacian {
public:
    explicit MobilityLaplacian(Matrix l) : l_(std::move(l)) {}

    std::size_t size() const noexcept { return static_cast<std::size_t>(l_.rows()); }
    const Matrix& matrix() const noexcept { return l_; }

private:
    Matrix l_;
};

/// q_ij = nu_i / outdegree(i) on every edge.
GeneratorMatrix uniform_out_rates(const RegionGraph& g, const Vector& nu);
GeneratorMatrix uniform_out_rates(const RegionGraph& g, double nu);

/// Degree-corrected Metropolis-Hastings embedding:
///   q_ij = base_rate * min(1, (t_j d_i) / (t_i d_j)) / d_i on each edge.
/// The result is reversible with respect to `target`.
GeneratorMatrix metropolis_hastings_rates(const RegionGraph& g, const Vector& target,
                                          double base_rate);

/// v with Q^T v = 0 and sum v = 1 (bordered dense LU).
PopulationDistribution stationary_distribution(const GeneratorMatrix& g);

/// l_ii = sum_{j != i} q_ji x_j / x_i, l_ij = -q_ji x_j / x_i.
MobilityLaplacian mobility_laplacian(const GeneratorMatrix& g, const Vector& x);
MobilityLaplacian mobility_laplacian(const GeneratorMatrix& g,
                                     const PopulationDistribution& x);

namespace detail {
/// Strong connectivity of the digraph with an edge i -> j wherever
/// m(i, j) > 0 for i != j.
bool positive_pattern_strongly_connected(const Matrix& m);
}  // namespace detail

}  // namespace epimob
