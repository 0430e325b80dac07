#include "epimob/spectral.hpp"

#include "epimob/error.hpp"
#include "epimob/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace epimob {

// ---------------------------------------------------------------------------
// EpidemicParams

EpidemicParams::EpidemicParams(Vector beta, Vector delta)
    : beta_(std::move(beta)), delta_(std::move(delta)) {
    if (beta_.size() == 0 || beta_.size() != delta_.size())
        throw Error(ErrorKind::InvalidArgument, "beta and delta must be non-empty and of equal length");
    for (Eigen::Index i = 0; i < beta_.size(); ++i) {
        if (!(beta_[i] > 0.0) || !std::isfinite(beta_[i]))
            throw Error(ErrorKind::InvalidArgument,
                        "beta[" + std::to_string(i) + "] must be positive", static_cast<std::size_t>(i));
        if (!(delta_[i] >= 0.0) || !std::isfinite(delta_[i]))
            throw Error(ErrorKind::InvalidArgument,
                        "delta[" + std::to_string(i) + "] must be nonnegative", static_cast<std::size_t>(i));
    }
}

EpidemicParams EpidemicParams::uniform(std::size_t n, double beta, double delta) {
    const auto nn = static_cast<Eigen::Index>(n);
    return EpidemicParams(Vector::Constant(nn, beta), Vector::Constant(nn, delta));
}

bool EpidemicParams::any_recovery() const { return (delta_.array() > 0.0).any(); }

// ---------------------------------------------------------------------------
// Perron iteration

namespace {

// Perron pair of M + cI, which the caller guarantees is nonnegative and
// irreducible with a positive diagonal or primitive pattern.
PerronPair shifted_power_iteration(const Matrix& m, double shift, const PerronOptions& opts) {
    const auto n = static_cast<std::size_t>(m.rows());
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix shifted = m;
    shifted.diagonal().array() += shift;

    const auto& k = kernels::active();
    Vector y = Vector::Constant(nn, 1.0 / static_cast<double>(n));
    Vector z(nn);
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        k.matvec(shifted.data(), n, n, y.data(), z.data());
        double lo = 0.0;
        double hi = 0.0;
        k.ratio_bounds(z.data(), y.data(), n, &lo, &hi);
        const double total = z.sum();
        if (!(total > 0.0) || !std::isfinite(total))
            throw Error(ErrorKind::NoConvergence, "power iteration collapsed");
        y = z / total;
        if (hi - lo <= opts.rel_tol * std::max(std::abs(hi), 1e-300)) {
            PerronPair out;
            out.value = 0.5 * (lo + hi) - shift;
            out.vector = std::move(y);
            out.iterations = it;
            return out;
        }
    }
    throw Error(ErrorKind::NoConvergence,
                "power iteration did not converge in " + std::to_string(opts.max_iterations) +
                    " iterations");
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a non-empty square matrix");
}

}  // namespace

PerronPair spectral_abscissa(const Matrix& m, const PerronOptions& opts) {
    require_square(m, "Metzler matrix");
    const Eigen::Index n = m.rows();
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && m(i, j) < 0.0)
                throw Error(ErrorKind::NotMetzler,
                            "negative off-diagonal in row " + std::to_string(i),
                            static_cast<std::size_t>(i));
        max_diag = std::max(max_diag, std::abs(m(i, i)));
    }
    if (!detail::positive_pattern_strongly_connected(m))
        throw Error(ErrorKind::NotIrreducible, "Metzler matrix is not irreducible");
    return shifted_power_iteration(m, 1.0 + max_diag, opts);
}

PerronPair perron_root(const Matrix& a, const PerronOptions& opts) {
    require_square(a, "nonnegative matrix");
    if ((a.array() < 0.0).any())
        throw Error(ErrorKind::InvalidArgument, "matrix has negative entries");
    if (!detail::positive_pattern_strongly_connected(a))
        throw Error(ErrorKind::NotIrreducible, "nonnegative matrix is not irreducible");
    // A positive matrix is primitive; otherwise shift by I to break periodicity.
    const double shift = (a.array() > 0.0).all() ? 0.0 : 1.0;
    return shifted_power_iteration(a, shift, opts);
}

// ---------------------------------------------------------------------------

Matrix infection_jacobian(const EpidemicParams& params, const MobilityLaplacian& lstar) {
    if (params.size() != lstar.size())
        throw Error(ErrorKind::InvalidArgument, "parameter and Laplacian sizes differ");
    Matrix j = -lstar.matrix();
    j.diagonal() += params.beta() - params.delta();
    return j;
}

Matrix next_generation_matrix(const EpidemicParams& params, const MobilityLaplacian& lstar) {
    if (params.size() != lstar.size())
        throw Error(ErrorKind::InvalidArgument, "parameter and Laplacian sizes differ");
    if (!params.any_recovery())
        throw Error(ErrorKind::SingularMMatrix, "L* + D is singular when every delta is zero");
    Matrix ld = lstar.matrix();
    ld.diagonal() += params.delta();
    const Eigen::PartialPivLU<Matrix> lu(ld);
    Matrix a = lu.solve(Matrix(params.beta().asDiagonal()));
    // Inverse of a nonsingular M-matrix is nonnegative; drop rounding noise.
    a = a.cwiseMax(0.0);
    return a;
}

double reproduction_number(const EpidemicParams& params, const MobilityLaplacian& lstar) {
    return perron_root(next_generation_matrix(params, lstar)).value;
}

Vector normalized_left_null_vector(const PopulationDistribution& v) {
    return v.values() / v.values().maxCoeff();
}

Vector weighted_symmetric_spectrum(const MobilityLaplacian& lstar, const PopulationDistribution& v) {
    if (lstar.size() != v.size())
        throw Error(ErrorKind::InvalidArgument, "Laplacian and distribution sizes differ");
    const Vector w = normalized_left_null_vector(v);
    const Eigen::MatrixXd wl = w.asDiagonal() * lstar.matrix();
    const Eigen::MatrixXd s = 0.5 * (wl + wl.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "symmetric eigensolver failed");
    return solver.eigenvalues();  // ascending
}

double lambda2_weighted(const MobilityLaplacian& lstar, const PopulationDistribution& v) {
    if (lstar.size() < 2) return 0.0;
    return weighted_symmetric_spectrum(lstar, v)[1];
}

double mobility_condition_margin(double lambda2, const Vector& w, const EpidemicParams& params) {
    const Vector gap = params.delta() - params.beta();
    const double m = gap.minCoeff();
    const double slack = w.dot((gap.array() - m).matrix());
    if (!(slack > 0.0)) return m;
    const double n = static_cast<double>(params.size());
    const double root = 1.0 + std::sqrt(1.0 + lambda2 / slack);
    return lambda2 / (root * root * n + 1.0) + m;
}

double m_lower_bound(const GeneratorMatrix& g) {
    const auto v = stationary_distribution(g);
    const auto lstar = mobility_laplacian(g, v);
    const double n = static_cast<double>(g.size());
    return -lambda2_weighted(lstar, v) / (4.0 * n + 1.0);
}

StabilityConditions corollary_conditions(const EpidemicParams& params, const GeneratorMatrix& g) {
    if (params.size() != g.size())
        throw Error(ErrorKind::InvalidArgument, "parameter and generator sizes differ");
    const auto v = stationary_distribution(g);
    const auto lstar = mobility_laplacian(g, v);
    const Vector& beta = params.beta();
    const Vector& delta = params.delta();

    StabilityConditions c;
    c.necessary_exit_rate = true;
    c.sufficient_every_node = true;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        const double nu = g.exit_rate(static_cast<std::size_t>(i));
        if (!(delta[i] > beta[i] - nu)) c.necessary_exit_rate = false;
        if (delta[i] >= beta[i]) c.necessary_some_node = true;
        else c.sufficient_every_node = false;
    }
    const double lambda2 = lambda2_weighted(lstar, v);
    c.mobility_margin = mobility_condition_margin(lambda2, normalized_left_null_vector(v), params);
    // rates built to sit exactly on the boundary land within roundoff of it
    const double scale = std::max({1.0, lambda2, beta.cwiseAbs().maxCoeff(), delta.cwiseAbs().maxCoeff()});
    c.sufficient_mobility = c.mobility_margin >= -1e-12 * scale;
    return c;
}

Vector recovery_rates_for_mobility_condition(const Vector& beta, const GeneratorMatrix& g, double m,
                                             const std::vector<std::size_t>& pinned) {
    const std::size_t n = g.size();
    if (static_cast<std::size_t>(beta.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "beta must have one entry per node");
    std::vector<bool> is_pinned(n, false);
    for (std::size_t i : pinned) {
        if (i >= n) throw Error(ErrorKind::InvalidArgument, "pinned node out of range", i);
        is_pinned[i] = true;
    }
    const auto free_count =
        static_cast<std::size_t>(std::count(is_pinned.begin(), is_pinned.end(), false));
    if (pinned.empty() || free_count == 0)
        throw Error(ErrorKind::InvalidArgument, "need at least one pinned and one free node");

    const auto v = stationary_distribution(g);
    const auto lstar = mobility_laplacian(g, v);
    const double lambda2 = lambda2_weighted(lstar, v);
    const double nn = static_cast<double>(n);
    const double m_lower = -lambda2 / (4.0 * nn + 1.0);
    if (!(m < 0.0) || !(m > m_lower))
        throw Error(ErrorKind::InfeasibleMargin,
                    "m = " + std::to_string(m) + " must lie in (m_lower, 0) = (" +
                        std::to_string(m_lower) + ", 0)");

    // lambda2 / ((1 + s)^2 n + 1) = -m  with  s = sqrt(1 + lambda2 / S)
    const double denom = -lambda2 / m;
    const double s = std::sqrt((denom - 1.0) / nn) - 1.0;
    const double slack = lambda2 / (s * s - 1.0);

    const Vector w = normalized_left_null_vector(v);
    Vector delta(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        double d = beta[ii] + m;
        if (!is_pinned[i]) d += slack / (static_cast<double>(free_count) * w[ii]);
        if (d < 0.0)
            throw Error(ErrorKind::InfeasibleMargin, "recovery rate would be negative", i);
        delta[ii] = d;
    }
    return delta;
}

std::string_view to_string(Verdict v) {
    return v == Verdict::DiseaseFreeStable ? "DiseaseFreeStable" : "EndemicStable";
}

StabilityReport classify(const EpidemicParams& params, const GeneratorMatrix& g) {
    if (params.size() != g.size())
        throw Error(ErrorKind::InvalidArgument, "parameter and generator sizes differ");
    const auto v = stationary_distribution(g);
    const auto lstar = mobility_laplacian(g, v);
    const auto pair = spectral_abscissa(infection_jacobian(params, lstar));

    StabilityReport r;
    r.mu = pair.value;
    r.perron_vector = pair.vector;
    if (params.any_recovery()) r.r0 = reproduction_number(params, lstar);
    r.lambda2 = lambda2_weighted(lstar, v);
    r.m = (params.delta() - params.beta()).minCoeff();
    r.m_lower = -r.lambda2 / (4.0 * static_cast<double>(g.size()) + 1.0);
    r.conditions = corollary_conditions(params, g);
    r.verdict = r.mu <= 0.0 ? Verdict::DiseaseFreeStable : Verdict::EndemicStable;
    r.v = v.values();
    return r;
}

}  // namespace epimob
