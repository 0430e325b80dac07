#pragma once

// Random instances and independent dense oracles shared by the unit tests and
// the acceptance runner.

#include "epimob/equilibria.hpp"
#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace epimob::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }

    /// Ring backbone in a random node order plus random extra edges, so the
    /// result is always strongly connected but usually not symmetric.
    GeneratorMatrix irreducible_generator(std::size_t n, double density = 0.3) {
        Matrix q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        if (n == 1) return GeneratorMatrix::validate(q);
        std::vector<std::size_t> order(n);
        for (std::size_t k = 0; k < n; ++k) order[k] = k;
        std::shuffle(order.begin(), order.end(), rng_);
        for (std::size_t k = 0; k < n; ++k) q(order[k], order[(k + 1) % n]) = uniform(0.05, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && q(i, j) == 0.0 && coin(density)) q(i, j) = uniform(0.01, 1.0);
        for (Eigen::Index i = 0; i < q.rows(); ++i) q(i, i) = -q.row(i).sum();
        return GeneratorMatrix::validate(q);
    }

    Vector vector(std::size_t n, double lo, double hi) {
        Vector v(static_cast<Eigen::Index>(n));
        for (auto& e : v) e = uniform(lo, hi);
        return v;
    }

    /// Random irreducible Metzler matrix: positive pattern from an
    /// irreducible generator, arbitrary diagonal.
    Matrix metzler(std::size_t n) {
        const auto g = irreducible_generator(n, 0.4);
        Matrix m = g.q();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (i != j && m(i, j) > 0.0) m(i, j) = uniform(0.05, 2.0);
            m(i, i) = uniform(-3.0, 1.0);
        }
        return m;
    }

    /// Params with at least one positive delta.
    EpidemicParams params(std::size_t n) {
        Vector beta = vector(n, 0.05, 1.0);
        Vector delta = vector(n, 0.0, 1.0);
        if (coin(0.2)) delta[static_cast<Eigen::Index>(index(0, n - 1))] = 0.0;
        if (!(delta.array() > 0.0).any()) delta[0] = 0.5;
        return EpidemicParams(beta, delta);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

struct EndemicInstance {
    GeneratorMatrix g;
    EpidemicParams params;
};

/// Random instance with mu > 0 whose endemic state is not close to the
/// boundary, so the ODE relaxes to it well within the default horizon.
inline EndemicInstance random_endemic_instance(Gen& gen, std::size_t max_n = 10) {
    for (;;) {
        const std::size_t n = gen.index(1, max_n);
        auto g = gen.irreducible_generator(n);
        Vector beta = gen.vector(n, 0.3, 1.5);
        Vector delta = gen.vector(n, 0.05, 0.6);
        EpidemicParams params(beta, delta);
        const auto lstar = mobility_laplacian(g, stationary_distribution(g));
        const double mu = spectral_abscissa(infection_jacobian(params, lstar)).value;
        if (mu < 0.05) continue;
        return {std::move(g), std::move(params)};
    }
}

/// Dense oracle: right null vector of Q^T from the SVD, scaled to unit sum.
inline Vector oracle_stationary(const Matrix& q) {
    Eigen::MatrixXd qt = q.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(qt, Eigen::ComputeFullV);
    Vector v = svd.matrixV().col(svd.matrixV().cols() - 1);
    return v / v.sum();
}

/// Dense oracle: largest real part over the full eigen-decomposition.
inline double oracle_abscissa(const Matrix& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m), false);
    return es.eigenvalues().real().maxCoeff();
}

/// Dense oracle: spectral radius.
inline double oracle_radius(const Matrix& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Literal per-node form of the p equation:
///   dp_i = -delta_i p_i + beta_i p_i (1 - p_i) + sum_{j != i} q_ji (p_j - p_i) x_j / x_i
inline Vector oracle_dp(const Vector& p, const Vector& x, const EpidemicParams& params, const Matrix& q) {
    const Eigen::Index n = p.size();
    Vector dp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = -params.delta()[i] * p[i] + params.beta()[i] * p[i] * (1.0 - p[i]);
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) s += q(j, i) * (p[j] - p[i]) * x[j] / x[i];
        dp[i] = s;
    }
    return dp;
}

/// Closed-form logistic solution of p' = (beta - delta) p - beta p^2.
inline double logistic(double p0, double beta, double delta, double t) {
    const double r = beta - delta;
    const double k = r / beta;
    return k / (1.0 + (k / p0 - 1.0) * std::exp(-r * t));
}

}  // namespace epimob::testing
