#pragma once

// Disease-free and endemic equilibria.
//
// The endemic state is the unique strictly positive fixed point of
//   H(p) = (I + A diag(p))^{-1} A p,   A = (L* + D)^{-1} B,
// reached by monotone iteration downward from the all-ones vector.

#include "epimob/dynamics.hpp"
#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"
#include "epimob/types.hpp"

#include <cstddef>

namespace epimob {

/// (p, x) = (0, v)
ModelState disease_free(const GeneratorMatrix& g);

/// Solves (I + A diag(p)) h = A p.
Vector h_map(const Vector& p, const Matrix& a);

struct EndemicSolution {
    Vector p_star;
    std::size_t iterations = 0;
    /// ||(B - D - L* - diag(p*) B) p*||_inf
    double residual = 0.0;
};

struct FixedPointOptions {
    double tol = 1e-12;               // on ||p_{k+1} - p_k||_inf
    std::size_t max_iterations = 1000000;
    double residual_tol = 1e-10;
};

EndemicSolution endemic_fixed_point(const EpidemicParams& params, const GeneratorMatrix& g,
                                    const FixedPointOptions& opts = {});

/// Same iteration from an arbitrary start in [0, 1]^n (used to check
/// uniqueness from the lower box corner).
EndemicSolution endemic_fixed_point_from(const EpidemicParams& params, const GeneratorMatrix& g,
                                         const Vector& start, const FixedPointOptions& opts = {});

/// Equilibrium residual ||(B - D - L* - diag(p) B) p||_inf.
double equilibrium_residual(const EpidemicParams& params, const MobilityLaplacian& lstar,
                            const Vector& p);

/// Lower corner eps * u of the invariant box [eps u, 1] for H, with u the
/// Perron vector of A and eps halved from 1 until H(eps u) >= eps u.
struct LowerBox {
    double epsilon = 1.0;
    Vector u;
};

LowerBox lower_box_vector(const Matrix& a);

}  // namespace epimob
