#include "epimob/mobility_graph.hpp"

#include "epimob/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epimob {

namespace {

constexpr double kStructuralTol = 1e-12;

std::vector<bool> reachable(const Matrix& m, std::size_t start, bool reverse) {
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < n; ++w) {
            if (w == u || seen[w]) continue;
            const double entry = reverse ? m(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(u))
                                         : m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(w));
            if (entry > 0.0) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

Matrix adjacency(const RegionGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Matrix a = Matrix::Zero(n, n);
    for (const Edge& e : g.edges())
        a(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = 1.0;
    return a;
}

}  // namespace

namespace detail {

bool positive_pattern_strongly_connected(const Matrix& m) {
    if (m.rows() <= 1) return true;
    const auto fwd = reachable(m, 0, false);
    const auto bwd = reachable(m, 0, true);
    return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RegionGraph

RegionGraph::RegionGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), out_degree_(n, 0) {
    if (n_ == 0) throw Error(ErrorKind::InvalidArgument, "graph must have at least one node");
    for (const Edge& e : edges_) {
        if (e.from >= n_ || e.to >= n_)
            throw Error(ErrorKind::InvalidArgument,
                        "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                            ") out of range");
        if (e.from == e.to)
            throw Error(ErrorKind::InvalidArgument,
                        "self-loop at node " + std::to_string(e.from), e.from);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const Edge& e : edges_) ++out_degree_[e.from];
}

bool RegionGraph::has_edge(std::size_t from, std::size_t to) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

bool RegionGraph::is_symmetric() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [this](const Edge& e) { return has_edge(e.to, e.from); });
}

bool RegionGraph::is_strongly_connected() const {
    return detail::positive_pattern_strongly_connected(adjacency(*this));
}

GraphKind parse_graph_kind(std::string_view name) {
    if (name == "line") return GraphKind::line;
    if (name == "ring") return GraphKind::ring;
    if (name == "star") return GraphKind::star;
    if (name == "complete") return GraphKind::complete;
    throw Error(ErrorKind::InvalidArgument, "unknown graph kind '" + std::string(name) + "'");
}

std::string_view to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::line: return "line";
        case GraphKind::ring: return "ring";
        case GraphKind::star: return "star";
        case GraphKind::complete: return "complete";
    }
    return "unknown";
}

RegionGraph make_graph(GraphKind kind, std::size_t n) {
    if (n < 2) throw Error(ErrorKind::TooFewNodes, "graph generators need n >= 2");
    std::vector<Edge> edges;
    auto both = [&edges](std::size_t a, std::size_t b) {
        edges.push_back({a, b});
        edges.push_back({b, a});
    };
    switch (kind) {
        case GraphKind::line:
            for (std::size_t i = 0; i + 1 < n; ++i) both(i, i + 1);
            break;
        case GraphKind::ring:
            for (std::size_t i = 0; i + 1 < n; ++i) both(i, i + 1);
            if (n > 2) both(n - 1, 0);
            break;
        case GraphKind::star:
            for (std::size_t j = 1; j < n; ++j) both(0, j);
            break;
        case GraphKind::complete:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) both(i, j);
            break;
    }
    return RegionGraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// GeneratorMatrix

namespace {

RegionGraph positive_pattern(const Matrix& q) {
    std::vector<Edge> edges;
    const Eigen::Index n = q.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && q(i, j) > 0.0) edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    return RegionGraph(static_cast<std::size_t>(n), std::move(edges));
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(Matrix q)
    : q_(std::move(q)), qt_(q_.transpose()), graph_(positive_pattern(q_)) {}

GeneratorMatrix GeneratorMatrix::validate(Matrix q) {
    if (q.rows() != q.cols() || q.rows() == 0)
        throw Error(ErrorKind::InvalidArgument, "generator must be a non-empty square matrix");
    const Eigen::Index n = q.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        double scale = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = q(i, j);
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidArgument,
                            "non-finite entry in row " + std::to_string(i), static_cast<std::size_t>(i));
            if (i != j && v < 0.0)
                throw Error(ErrorKind::NegativeOffDiagonal,
                            "row " + std::to_string(i) + " has a negative off-diagonal rate",
                            static_cast<std::size_t>(i));
            sum += v;
            scale += std::abs(v);
        }
        if (std::abs(sum) > kStructuralTol * std::max(1.0, scale))
            throw Error(ErrorKind::NonzeroRowSum,
                        "row " + std::to_string(i) + " sums to " + std::to_string(sum),
                        static_cast<std::size_t>(i));
    }
    return GeneratorMatrix(std::move(q));
}

GeneratorMatrix GeneratorMatrix::from_rates(std::size_t n, const std::vector<Edge>& edges,
                                            const std::vector<double>& rates) {
    if (edges.size() != rates.size())
        throw Error(ErrorKind::InvalidArgument, "edge and rate lists differ in length");
    const RegionGraph checked(n, edges);  // range and self-loop checks
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix q = Matrix::Zero(nn, nn);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!(rates[k] >= 0.0))
            throw Error(ErrorKind::NegativeOffDiagonal,
                        "negative rate on edge from node " + std::to_string(edges[k].from),
                        edges[k].from);
        q(static_cast<Eigen::Index>(edges[k].from), static_cast<Eigen::Index>(edges[k].to)) =
            rates[k];
    }
    for (Eigen::Index i = 0; i < nn; ++i) {
        double out = 0.0;
        for (Eigen::Index j = 0; j < nn; ++j)
            if (j != i) out += q(i, j);
        q(i, i) = -out;
    }
    return validate(std::move(q));
}

bool is_irreducible(const GeneratorMatrix& g) {
    return detail::positive_pattern_strongly_connected(g.q());
}

// ---------------------------------------------------------------------------
// PopulationDistribution

PopulationDistribution::PopulationDistribution(Vector x) : x_(std::move(x)) {
    if (x_.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty population distribution");
    for (Eigen::Index i = 0; i < x_.size(); ++i)
        if (!(x_[i] > 0.0))
            throw Error(ErrorKind::ZeroPopulationEntry,
                        "population fraction at node " + std::to_string(i) + " is not positive",
                        static_cast<std::size_t>(i));
    if (std::abs(x_.sum() - 1.0) > kStructuralTol)
        throw Error(ErrorKind::InvalidArgument, "population fractions do not sum to one");
}

PopulationDistribution PopulationDistribution::uniform(std::size_t n) {
    return PopulationDistribution(
        Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Rate constructions

GeneratorMatrix uniform_out_rates(const RegionGraph& g, const Vector& nu) {
    if (static_cast<std::size_t>(nu.size()) != g.size())
        throw Error(ErrorKind::InvalidArgument, "nu must have one entry per node");
    std::vector<double> rates;
    rates.reserve(g.edges().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.size() > 1 && g.out_degree(i) == 0)
            throw Error(ErrorKind::IsolatedNode,
                        "node " + std::to_string(i) + " has no outgoing edge", i);
        if (!(nu[static_cast<Eigen::Index>(i)] > 0.0) && g.size() > 1)
            throw Error(ErrorKind::InvalidArgument,
                        "exit rate at node " + std::to_string(i) + " must be positive", i);
    }
    for (const Edge& e : g.edges())
        rates.push_back(nu[static_cast<Eigen::Index>(e.from)] /
                        static_cast<double>(g.out_degree(e.from)));
    return GeneratorMatrix::from_rates(g.size(), g.edges(), rates);
}

GeneratorMatrix uniform_out_rates(const RegionGraph& g, double nu) {
    return uniform_out_rates(g, Vector::Constant(static_cast<Eigen::Index>(g.size()), nu));
}

GeneratorMatrix metropolis_hastings_rates(const RegionGraph& g, const Vector& target,
                                          double base_rate) {
    if (static_cast<std::size_t>(target.size()) != g.size())
        throw Error(ErrorKind::InvalidArgument, "target must have one entry per node");
    if (!g.is_symmetric())
        throw Error(ErrorKind::AsymmetricGraph, "Metropolis-Hastings rates need an undirected graph");
    if (!(base_rate > 0.0))
        throw Error(ErrorKind::InvalidArgument, "base_rate must be positive");
    for (Eigen::Index i = 0; i < target.size(); ++i)
        if (!(target[i] > 0.0))
            throw Error(ErrorKind::ZeroTargetEntry,
                        "target entry " + std::to_string(i) + " is not positive",
                        static_cast<std::size_t>(i));
    std::vector<double> rates;
    rates.reserve(g.edges().size());
    for (const Edge& e : g.edges()) {
        const double di = static_cast<double>(g.out_degree(e.from));
        const double dj = static_cast<double>(g.out_degree(e.to));
        const double ti = target[static_cast<Eigen::Index>(e.from)];
        const double tj = target[static_cast<Eigen::Index>(e.to)];
        const double accept = std::min(1.0, (tj * di) / (ti * dj));
        rates.push_back(base_rate * accept / di);
    }
    return GeneratorMatrix::from_rates(g.size(), g.edges(), rates);
}

PopulationDistribution stationary_distribution(const GeneratorMatrix& g) {
    if (!is_irreducible(g))
        throw Error(ErrorKind::NotIrreducible, "generator is not irreducible");
    const auto n = static_cast<Eigen::Index>(g.size());
    // Q^T has rank n - 1; swap its last row for the normalization 1^T v = 1.
    Matrix bordered = g.qt();
    bordered.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs[n - 1] = 1.0;
    const Eigen::PartialPivLU<Matrix> lu(bordered);
    Vector v = lu.solve(rhs);
    // one step of iterative refinement
    const Vector r = rhs - bordered * v;
    v += lu.solve(r);
    v /= v.sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(v[i] > 0.0))
            throw Error(ErrorKind::SingularSystem,
                        "stationary solve lost positivity at node " + std::to_string(i),
                        static_cast<std::size_t>(i));
    return PopulationDistribution(std::move(v));
}

MobilityLaplacian mobility_laplacian(const GeneratorMatrix& g, const Vector& x) {
    const auto n = static_cast<Eigen::Index>(g.size());
    if (x.size() != n) throw Error(ErrorKind::InvalidArgument, "x must have one entry per node");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(x[i] > 0.0))
            throw Error(ErrorKind::ZeroPopulationEntry,
                        "population fraction at node " + std::to_string(i) + " is not positive",
                        static_cast<std::size_t>(i));
    Matrix l = Matrix::Zero(n, n);
    const Matrix& q = g.q();
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double inflow = q(j, i) * x[j] / x[i];
            l(i, j) = -inflow;
            diag += inflow;
        }
        l(i, i) = diag;
    }
    return MobilityLaplacian(std::move(l));
}

MobilityLaplacian mobility_laplacian(const GeneratorMatrix& g, const PopulationDistribution& x) {
    return mobility_laplacian(g, x.values());
}

}  // namespace epimob
