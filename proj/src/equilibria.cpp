#include "epimob/equilibria.hpp"

#include "epimob/error.hpp"
#include "epimob/kernels.hpp"

#include <cmath>
#include <string>

namespace epimob {

ModelState disease_free(const GeneratorMatrix& g) {
    const auto v = stationary_distribution(g);
    return {Vector::Zero(static_cast<Eigen::Index>(g.size())), v.values()};
}

Vector h_map(const Vector& p, const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() != p.size())
        throw Error(ErrorKind::InvalidArgument, "h_map: size mismatch");
    Matrix sys = a * p.asDiagonal();
    sys.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Matrix> lu(sys);
    Vector h = lu.solve(a * p);
    if (!h.allFinite()) throw Error(ErrorKind::SingularSystem, "I + A diag(p) is singular");
    return h;
}

double equilibrium_residual(const EpidemicParams& params, const MobilityLaplacian& lstar,
                            const Vector& p) {
    Vector r = infection_jacobian(params, lstar) * p;
    r.array() -= p.array() * params.beta().array() * p.array();
    return kernels::max_abs(view(r));
}

namespace {

struct Prepared {
    MobilityLaplacian lstar;
    Matrix a;
};

Prepared prepare(const EpidemicParams& params, const GeneratorMatrix& g) {
    if (params.size() != g.size())
        throw Error(ErrorKind::InvalidArgument, "parameter and generator sizes differ");
    const auto v = stationary_distribution(g);
    auto lstar = mobility_laplacian(g, v);
    Matrix a = next_generation_matrix(params, lstar);  // SingularMMatrix when all delta = 0
    const double mu = spectral_abscissa(infection_jacobian(params, lstar)).value;
    if (!(mu > 0.0))
        throw Error(ErrorKind::NotEndemicRegime,
                    "spectral abscissa " + std::to_string(mu) + " <= 0: no endemic equilibrium");
    return {std::move(lstar), std::move(a)};
}

EndemicSolution iterate(const EpidemicParams& params, const Prepared& prep, Vector p,
                        const FixedPointOptions& opts) {
    EndemicSolution sol;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        Vector next = h_map(p, prep.a);
        const double step = kernels::max_abs_diff(view(next), view(p));
        p = std::move(next);
        if (step <= opts.tol) {
            sol.iterations = it;
            if (!(p.minCoeff() > 1e-12))
                throw Error(ErrorKind::DegenerateSolution,
                            "fixed point has a zero entry; the instance sits at the threshold");
            sol.residual = equilibrium_residual(params, prep.lstar, p);
            if (sol.residual > opts.residual_tol)
                throw Error(ErrorKind::NoConvergence,
                            "fixed point residual " + std::to_string(sol.residual) +
                                " exceeds tolerance");
            sol.p_star = std::move(p);
            return sol;
        }
    }
    throw Error(ErrorKind::NoConvergence,
                "fixed-point iteration did not settle in " + std::to_string(opts.max_iterations) +
                    " iterations");
}

}  // namespace

EndemicSolution endemic_fixed_point(const EpidemicParams& params, const GeneratorMatrix& g,
                                    const FixedPointOptions& opts) {
    const Prepared prep = prepare(params, g);
    return iterate(params, prep, Vector::Ones(static_cast<Eigen::Index>(g.size())), opts);
}

EndemicSolution endemic_fixed_point_from(const EpidemicParams& params, const GeneratorMatrix& g,
                                         const Vector& start, const FixedPointOptions& opts) {
    if (static_cast<std::size_t>(start.size()) != g.size())
        throw Error(ErrorKind::InvalidArgument, "start vector has the wrong length");
    if ((start.array() < 0.0).any() || (start.array() > 1.0).any())
        throw Error(ErrorKind::InvalidArgument, "start vector must lie in [0, 1]^n");
    const Prepared prep = prepare(params, g);
    return iterate(params, prep, start, opts);
}

LowerBox lower_box_vector(const Matrix& a) {
    const PerronPair pair = perron_root(a);
    if (!(pair.value > 1.0))
        throw Error(ErrorKind::NotEndemicRegime,
                    "rho(A) = " + std::to_string(pair.value) + " <= 1: no endemic equilibrium");
    LowerBox box{1.0, pair.vector};
    for (int halvings = 0; halvings < 1074; ++halvings) {
        const Vector lower = box.epsilon * box.u;
        const Vector image = h_map(lower, a);
        if (((image - lower).array() >= 0.0).all()) return box;
        box.epsilon *= 0.5;
    }
    throw Error(ErrorKind::NoConvergence, "no epsilon found with H(eps u) >= eps u");
}

}  // namespace epimob
