#pragma once

// Finite-population simulation of the coupled mobility + SIS process.
//
// Channels at node k:
//   recovery           delta_k i_k
//   infection          beta_k i_k s_k / (s_k + i_k)    (zero when empty)
//   move S  k -> j     q_kj s_k
//   move I  k -> j     q_kj i_k

#include "epimob/mobility_graph.hpp"
#include "epimob/spectral.hpp"
#include "epimob/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace epimob {

struct Population {
    std::vector<std::int64_t> s;
    std::vector<std::int64_t> i;

    std::size_t size() const noexcept { return s.size(); }
    std::int64_t total() const;
    std::int64_t infected() const;

    /// Node sizes round(x_k * total), adjusted so they sum to total; infected
    /// counts round(p_k * node size).
    static Population from_fractions(const Vector& p, const Vector& x, std::int64_t total);
};

void validate_population(const Population& pop);

struct PopulationTrajectory {
    std::vector<double> times;
    std::vector<Population> samples;
};

/// Exact event-driven (Gillespie direct method) simulation, sampled every
/// `sample_interval` on [0, t_end].
PopulationTrajectory gillespie_run(const Population& pop0, const EpidemicParams& params,
                                   const GeneratorMatrix& g, double t_end, double sample_interval,
                                   std::uint64_t seed);

/// Synchronous fixed-step simulation. Each individual makes one categorical
/// draw per step over {move along an out-edge, change state, nothing} with
/// probabilities rate * dt; aggregated per node as multinomial counts.
/// Throws StepTooLarge when nu_k dt + max(beta_k, delta_k) dt > 1.
PopulationTrajectory fixed_step_run(const Population& pop0, const EpidemicParams& params,
                                    const GeneratorMatrix& g, double t_end, double dt,
                                    double sample_interval, std::uint64_t seed);

enum class StochasticMethod { gillespie, fixed_step };

StochasticMethod parse_stochastic_method(std::string_view name);
std::string_view to_string(StochasticMethod m);

struct EnsembleOptions {
    StochasticMethod method = StochasticMethod::fixed_step;
    double t_end = 100.0;
    double dt = 0.01;  // fixed_step only
    double sample_interval = 1.0;
    std::size_t replicas = 20;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0: hardware concurrency
};

/// Independent replicas with seeds replica_seed(seed, r); output order is the
/// replica index regardless of scheduling.
std::vector<PopulationTrajectory> run_replicas(const Population& pop0, const EpidemicParams& params,
                                               const GeneratorMatrix& g, const EnsembleOptions& opts);

struct EnsembleResult {
    std::vector<double> times;
    /// Mean over replicas of i_k / (s_k + i_k); NaN when every replica had
    /// node k empty at that time.
    std::vector<Vector> mean_p;
    /// Mean over replicas of (s_k + i_k) / N.
    std::vector<Vector> mean_x;
    /// Replicas excluded from mean_p because node k was empty.
    std::vector<std::vector<std::size_t>> missing;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
};

EnsembleResult ensemble_average(std::span<const PopulationTrajectory> runs, std::uint64_t seed = 0);

}  // namespace epimob
