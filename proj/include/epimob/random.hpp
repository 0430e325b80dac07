#pragma once

// Portable random variates. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the variates below are computed here
// rather than with <random> distributions so that a (seed, replica) pair gives
// the same draws on every standard library.

#include <cstdint>
#include <random>

namespace epimob {

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for replica `index` of an ensemble started from `base_seed`.
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate);

    /// Binomial(trials, prob) by geometric skipping; expected cost
    /// O(trials * min(prob, 1 - prob) + 1).
    std::int64_t binomial(std::int64_t trials, double prob);

private:
    std::mt19937_64 engine_;
};

}  // namespace epimob
