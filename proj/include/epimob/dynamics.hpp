#pragma once

// Deterministic continuum model
//   p' = (B - D - L(x)) p - P B p
//   x' = Q^T x
// and its fixed-step RK4 integration.

#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"
#include "epimob/types.hpp"

#include <cstddef>
#include <vector>

namespace epimob {

struct ModelState {
    Vector p;  // infected fraction per node, in [0, 1]
    Vector x;  // population fraction per node, open simplex

    std::size_t size() const noexcept { return static_cast<std::size_t>(p.size()); }
};

/// Checks p in [0,1]^n and x strictly positive with unit sum.
void validate_state(const ModelState& s);

struct StateDerivative {
    Vector dp;
    Vector dx;
};

StateDerivative rhs(const ModelState& state, const EpidemicParams& params, const GeneratorMatrix& g);

struct IntegrationOptions {
    double t_end = 100.0;
    double dt = 0.01;
    std::size_t output_stride = 1;  // keep every k-th step
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ModelState> states;
    EpidemicParams params;
    GeneratorMatrix generator;
    /// Steps where p drifted out of [0, 1] by <= 1e-9 and was clipped back.
    std::size_t clipped_steps = 0;
};

/// Classic RK4 on the joint (p, x) system. The final step is shortened so
/// the last sample lands on t_end exactly. Throws StateEscapedBox when p
/// leaves [-1e-9, 1 + 1e-9].
Trajectory integrate(const ModelState& initial, const EpidemicParams& params,
                     const GeneratorMatrix& g, const IntegrationOptions& opts);

struct LimitOptions {
    double dt = 0.01;
    double t_max = 500.0;
    double tol = 1e-10;  // on ||dp||_inf + ||dx||_inf
};

struct LimitResult {
    ModelState state;
    double time = 0.0;
    bool converged = false;
};

/// Integrates until the vector field is below tol or t_max is reached.
LimitResult limit_state(const GeneratorMatrix& g, const EpidemicParams& params,
                        const ModelState& initial, const LimitOptions& opts = {});

}  // namespace epimob
