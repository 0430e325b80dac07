#pragma once

// Eigenstructure of the linearized infection dynamics and the stability
// battery built on it.

#include "epimob/mobility_graph.hpp"
#include "epimob/types.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace epimob {

/// Per-node infection (beta > 0) and recovery (delta >= 0) rates.
class EpidemicParams {
public:
    EpidemicParams(Vector beta, Vector delta);
    static EpidemicParams uniform(std::size_t n, double beta, double delta);

    std::size_t size() const noexcept { return static_cast<std::size_t>(beta_.size()); }
    const Vector& beta() const noexcept { return beta_; }
    const Vector& delta() const noexcept { return delta_; }
    bool any_recovery() const;

private:
    Vector beta_;
    Vector delta_;
};

/// Dominant real eigenvalue of a Metzler (or nonnegative) matrix together
/// with its positive eigenvector, normalized to unit 1-norm.
struct PerronPair {
    double value = 0.0;
    Vector vector;
    std::size_t iterations = 0;
};

struct PerronOptions {
    double rel_tol = 1e-12;
    std::size_t max_iterations = 100000;
};

/// Power iteration on M + cI, c = 1 + max|m_ii|. Stops when the
/// Collatz-Wielandt bracket min/max (Ay)_i / y_i is tighter than rel_tol.
PerronPair spectral_abscissa(const Matrix& m, const PerronOptions& opts = {});

/// Spectral radius and Perron vector of an irreducible nonnegative matrix.
PerronPair perron_root(const Matrix& a, const PerronOptions& opts = {});

/// B - D - L*
Matrix infection_jacobian(const EpidemicParams& params, const MobilityLaplacian& lstar);

/// A = (L* + D)^{-1} B. Throws SingularMMatrix when every delta is zero.
Matrix next_generation_matrix(const EpidemicParams& params, const MobilityLaplacian& lstar);

/// R0 = rho((L* + D)^{-1} B).
double reproduction_number(const EpidemicParams& params, const MobilityLaplacian& lstar);

/// v / max_i v_i
Vector normalized_left_null_vector(const PopulationDistribution& v);

/// Second-smallest eigenvalue of (W L* + L*^T W) / 2 with W = diag(v / max v).
/// Zero for a single region.
double lambda2_weighted(const MobilityLaplacian& lstar, const PopulationDistribution& v);

/// Eigenvalues of (W L* + L*^T W) / 2 in ascending order.
Vector weighted_symmetric_spectrum(const MobilityLaplacian& lstar,
                                   const PopulationDistribution& v);

/// Literal evaluation of the four disease-free stability conditions:
///   (i)   delta_i > beta_i - nu_i for every i      (necessary)
///   (ii)  delta_i >= beta_i for some i             (necessary)
///   (iii) delta_i >= beta_i for every i            (sufficient)
///   (iv)  lambda2 / ((1 + sqrt(1 + lambda2 / S))^2 n + 1) + m >= 0  (sufficient)
/// with m = min_i(delta_i - beta_i) and S = sum_i w_i (delta_i - beta_i - m).
/// When S = 0 condition (iv) is taken as m >= 0. The margin test allows
/// 1e-12 of roundoff relative to the largest rate.
struct StabilityConditions {
    bool necessary_exit_rate = false;   // (i)
    bool necessary_some_node = false;   // (ii)
    bool sufficient_every_node = false; // (iii)
    bool sufficient_mobility = false;   // (iv)
    double mobility_margin = 0.0;       // left-hand side of (iv)
};

StabilityConditions corollary_conditions(const EpidemicParams& params, const GeneratorMatrix& g);

/// Left-hand side of condition (iv) for given lambda2, weights and rates.
double mobility_condition_margin(double lambda2, const Vector& w, const EpidemicParams& params);

/// -lambda2 / (4n + 1)
double m_lower_bound(const GeneratorMatrix& g);

/// Recovery rates that meet condition (iv) with equality.
///
/// Nodes in `pinned` get delta_i = beta_i + m; the remaining nodes share the
/// slack S needed for equality, spread so that w_i (delta_i - beta_i - m) is
/// the same for each free node. Requires m_lower < m < 0 and at least one
/// free node.
Vector recovery_rates_for_mobility_condition(const Vector& beta, const GeneratorMatrix& g,
                                             double m, const std::vector<std::size_t>& pinned);

enum class Verdict { DiseaseFreeStable, EndemicStable };

std::string_view to_string(Verdict v);

struct StabilityReport {
    double mu = 0.0;
    std::optional<double> r0;  // undefined when every delta is zero
    double lambda2 = 0.0;
    double m = 0.0;
    double m_lower = 0.0;
    Verdict verdict = Verdict::DiseaseFreeStable;
    StabilityConditions conditions;
    Vector v;           // stationary distribution
    Vector perron_vector;
};

StabilityReport classify(const EpidemicParams& params, const GeneratorMatrix& g);

}  // namespace epimob
