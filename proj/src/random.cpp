#include "epimob/random.hpp"

#include <cmath>

namespace epimob {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::exponential(double rate) { return -std::log(uniform_pos()) / rate; }

std::int64_t Rng::binomial(std::int64_t trials, double prob) {
    if (trials <= 0 || prob <= 0.0) return 0;
    if (prob >= 1.0) return trials;
    if (prob > 0.5) return trials - binomial(trials, 1.0 - prob);
    // Count successes by jumping over geometric runs of failures.
    const double log_q = std::log1p(-prob);
    std::int64_t successes = 0;
    double position = -1.0;
    const auto n = static_cast<double>(trials);
    while (true) {
        position += std::floor(std::log(uniform_pos()) / log_q) + 1.0;
        if (position >= n) break;
        ++successes;
    }
    return successes;
}

}  // namespace epimob
