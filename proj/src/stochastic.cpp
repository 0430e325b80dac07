#include "epimob/stochastic.hpp"

#include "epimob/error.hpp"
#include "epimob/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace epimob {

std::int64_t Population::total() const {
    return std::accumulate(s.begin(), s.end(), std::int64_t{0}) +
           std::accumulate(i.begin(), i.end(), std::int64_t{0});
}

std::int64_t Population::infected() const {
    return std::accumulate(i.begin(), i.end(), std::int64_t{0});
}

Population Population::from_fractions(const Vector& p, const Vector& x, std::int64_t total) {
    if (p.size() != x.size() || p.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "p and x must be non-empty and of equal length");
    if (total <= 0) throw Error(ErrorKind::InvalidArgument, "total population must be positive");
    const auto n = static_cast<std::size_t>(p.size());
    std::vector<std::int64_t> sizes(n);
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sizes[k] = std::llround(x[static_cast<Eigen::Index>(k)] * static_cast<double>(total));
        assigned += sizes[k];
    }
    // put the rounding remainder on the largest node
    const auto largest = static_cast<std::size_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    sizes[largest] += total - assigned;

    Population pop;
    pop.s.resize(n);
    pop.i.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pk = p[static_cast<Eigen::Index>(k)];
        if (!(pk >= 0.0 && pk <= 1.0))
            throw Error(ErrorKind::InvalidArgument, "p outside [0, 1]", k);
        pop.i[k] = std::llround(pk * static_cast<double>(sizes[k]));
        pop.s[k] = sizes[k] - pop.i[k];
    }
    validate_population(pop);
    return pop;
}

void validate_population(const Population& pop) {
    if (pop.s.empty() || pop.s.size() != pop.i.size())
        throw Error(ErrorKind::InvalidArgument, "s and i must be non-empty and of equal length");
    for (std::size_t k = 0; k < pop.size(); ++k)
        if (pop.s[k] < 0 || pop.i[k] < 0)
            throw Error(ErrorKind::InvalidArgument, "negative count at node " + std::to_string(k), k);
    if (pop.total() == 0) throw Error(ErrorKind::InvalidArgument, "population is empty");
}

namespace {

struct OutEdge {
    std::size_t to;
    double rate;
};

std::vector<std::vector<OutEdge>> out_edges(const GeneratorMatrix& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<OutEdge>> out(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            if (j != k && g.rate(k, j) > 0.0) out[k].push_back({j, g.rate(k, j)});
    return out;
}

void check_inputs(const Population& pop, const EpidemicParams& params, const GeneratorMatrix& g,
                  double t_end, double sample_interval) {
    validate_population(pop);
    if (pop.size() != g.size() || params.size() != g.size())
        throw Error(ErrorKind::InvalidArgument, "population, parameter and generator sizes differ");
    if (!is_irreducible(g)) throw Error(ErrorKind::NotIrreducible, "generator is not irreducible");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw Error(ErrorKind::InvalidArgument, "t_end must be nonnegative");
    if (!(sample_interval > 0.0))
        throw Error(ErrorKind::InvalidArgument, "sample_interval must be positive");
}

std::size_t sample_count(double t_end, double interval) {
    return static_cast<std::size_t>(std::floor(t_end / interval * (1.0 + 1e-12))) + 1;
}

class GillespieState {
public:
    GillespieState(Population pop, const EpidemicParams& params, const GeneratorMatrix& g)
        : pop_(std::move(pop)),
          beta_(params.beta()),
          delta_(params.delta()),
          nu_(g.size()),
          out_(out_edges(g)),
          node_rate_(g.size(), 0.0) {
        for (std::size_t k = 0; k < g.size(); ++k) nu_[k] = g.exit_rate(k);
        refresh_all();
    }

    const Population& population() const { return pop_; }
    double total_rate() const { return total_; }

    void fire(Rng& rng) {
        double target = rng.uniform() * total_;
        std::size_t k = 0;
        const std::size_t n = node_rate_.size();
        for (; k + 1 < n; ++k) {
            if (target < node_rate_[k]) break;
            target -= node_rate_[k];
        }
        // rounding can push the draw past the last node with a positive rate
        while (node_rate_[k] <= 0.0 && k > 0) --k;
        target = std::clamp(target, 0.0, std::nextafter(node_rate_[k], 0.0));

        const double rec = recovery(k);
        const double inf = infection(k);
        const double mov_s = nu_[k] * static_cast<double>(pop_.s[k]);
        if (target < rec && pop_.i[k] > 0) {
            --pop_.i[k];
            ++pop_.s[k];
            update(k);
        } else if (target < rec + inf && pop_.s[k] > 0) {
            --pop_.s[k];
            ++pop_.i[k];
            update(k);
        } else if (target < rec + inf + mov_s && pop_.s[k] > 0) {
            const std::size_t j = destination(k, rng);
            --pop_.s[k];
            ++pop_.s[j];
            update(k);
            update(j);
        } else if (pop_.i[k] > 0) {
            const std::size_t j = destination(k, rng);
            --pop_.i[k];
            ++pop_.i[j];
            update(k);
            update(j);
        } else {
            refresh_all();
        }
        if (++events_since_refresh_ >= 4096) refresh_all();
    }

private:
    double recovery(std::size_t k) const { return delta_[static_cast<Eigen::Index>(k)] * static_cast<double>(pop_.i[k]); }

    double infection(std::size_t k) const {
        const std::int64_t size = pop_.s[k] + pop_.i[k];
        if (size == 0) return 0.0;
        return beta_[static_cast<Eigen::Index>(k)] * static_cast<double>(pop_.i[k]) *
               static_cast<double>(pop_.s[k]) / static_cast<double>(size);
    }

    double node_rate(std::size_t k) const {
        return recovery(k) + infection(k) +
               nu_[k] * static_cast<double>(pop_.s[k] + pop_.i[k]);
    }

    void update(std::size_t k) {
        const double r = node_rate(k);
        total_ += r - node_rate_[k];
        node_rate_[k] = r;
    }

    void refresh_all() {
        total_ = 0.0;
        for (std::size_t k = 0; k < node_rate_.size(); ++k) {
            node_rate_[k] = node_rate(k);
            total_ += node_rate_[k];
        }
        events_since_refresh_ = 0;
    }

    std::size_t destination(std::size_t k, Rng& rng) const {
        double target = rng.uniform() * nu_[k];
        const auto& edges = out_[k];
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            if (target < edges[e].rate) return edges[e].to;
            target -= edges[e].rate;
        }
        return edges.back().to;
    }

    Population pop_;
    Vector beta_;
    Vector delta_;
    std::vector<double> nu_;
    std::vector<std::vector<OutEdge>> out_;
    std::vector<double> node_rate_;
    double total_ = 0.0;
    std::size_t events_since_refresh_ = 0;
};

}  // namespace

PopulationTrajectory gillespie_run(const Population& pop0, const EpidemicParams& params,
                                   const GeneratorMatrix& g, double t_end, double sample_interval,
                                   std::uint64_t seed) {
    check_inputs(pop0, params, g, t_end, sample_interval);
    const std::size_t samples = sample_count(t_end, sample_interval);
    PopulationTrajectory out;
    out.times.reserve(samples);
    out.samples.reserve(samples);

    Rng rng(seed);
    GillespieState state(pop0, params, g);
    std::size_t next = 0;
    double t = 0.0;
    auto record_until = [&](double horizon) {
        while (next < samples) {
            const double ts = static_cast<double>(next) * sample_interval;
            if (ts > horizon) break;
            out.times.push_back(ts);
            out.samples.push_back(state.population());
            ++next;
        }
    };
    while (next < samples) {
        const double total = state.total_rate();
        if (!(total > 0.0)) {
            record_until(std::numeric_limits<double>::infinity());
            break;
        }
        const double t_event = t + rng.exponential(total);
        // samples strictly before the event see the pre-event state
        while (next < samples && static_cast<double>(next) * sample_interval < t_event) {
            out.times.push_back(static_cast<double>(next) * sample_interval);
            out.samples.push_back(state.population());
            ++next;
        }
        if (next >= samples) break;
        state.fire(rng);
        t = t_event;
    }
    return out;
}

PopulationTrajectory fixed_step_run(const Population& pop0, const EpidemicParams& params,
                                    const GeneratorMatrix& g, double t_end, double dt,
                                    double sample_interval, std::uint64_t seed) {
    check_inputs(pop0, params, g, t_end, sample_interval);
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    const std::size_t n = g.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double worst = (g.exit_rate(k) + std::max(params.beta()[kk], params.delta()[kk])) * dt;
        if (worst > 1.0)
            throw Error(ErrorKind::StepTooLarge,
                        "event probability " + std::to_string(worst) + " > 1 at node " +
                            std::to_string(k) + "; reduce dt",
                        k);
    }
    const double stride_f = sample_interval / dt;
    const auto stride = static_cast<std::size_t>(std::llround(stride_f));
    if (stride == 0 || std::abs(stride_f - static_cast<double>(stride)) > 1e-9 * stride_f)
        throw Error(ErrorKind::InvalidArgument, "sample_interval must be a multiple of dt");
    const auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));

    const auto out = out_edges(g);
    Rng rng(seed);
    Population cur = pop0;
    Population next = pop0;

    PopulationTrajectory traj;
    traj.times.push_back(0.0);
    traj.samples.push_back(cur);

    // Multinomial over {edges..., state change, stay} by conditional binomials.
    auto split = [&](std::int64_t count, std::size_t k, double change_prob,
                     std::vector<std::int64_t>& dest_counts, std::int64_t& changed) {
        double remaining_prob = 1.0;
        for (const OutEdge& e : out[k]) {
            if (count == 0) return;
            const double pe = e.rate * dt;
            const std::int64_t moved = rng.binomial(count, std::min(1.0, pe / remaining_prob));
            count -= moved;
            remaining_prob -= pe;
            dest_counts[e.to] += moved;
            dest_counts[k] -= moved;
        }
        if (count == 0 || change_prob <= 0.0) return;
        changed = rng.binomial(count, std::min(1.0, change_prob / remaining_prob));
    };

    for (std::size_t step = 1; step <= steps; ++step) {
        next = cur;
        for (std::size_t k = 0; k < n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const std::int64_t size = cur.s[k] + cur.i[k];
            if (size == 0) continue;
            const double infect_prob = params.beta()[kk] *
                                       (static_cast<double>(cur.i[k]) / static_cast<double>(size)) * dt;
            const double recover_prob = params.delta()[kk] * dt;
            std::int64_t infected = 0;
            std::int64_t recovered = 0;
            split(cur.s[k], k, infect_prob, next.s, infected);
            split(cur.i[k], k, recover_prob, next.i, recovered);
            next.s[k] += recovered - infected;
            next.i[k] += infected - recovered;
        }
        std::swap(cur, next);
        if (step % stride == 0) {
            traj.times.push_back(static_cast<double>(step) * dt);
            traj.samples.push_back(cur);
        }
    }
    return traj;
}

StochasticMethod parse_stochastic_method(std::string_view name) {
    if (name == "gillespie") return StochasticMethod::gillespie;
    if (name == "fixed_step") return StochasticMethod::fixed_step;
    throw Error(ErrorKind::InvalidArgument, "unknown stochastic method '" + std::string(name) + "'");
}

std::string_view to_string(StochasticMethod m) {
    return m == StochasticMethod::gillespie ? "gillespie" : "fixed_step";
}

std::vector<PopulationTrajectory> run_replicas(const Population& pop0, const EpidemicParams& params,
                                               const GeneratorMatrix& g, const EnsembleOptions& opts) {
    if (opts.replicas == 0) throw Error(ErrorKind::InvalidArgument, "replicas must be positive");
    std::vector<PopulationTrajectory> runs(opts.replicas);
    auto one = [&](std::size_t r) {
        const std::uint64_t seed = replica_seed(opts.seed, r);
        runs[r] = opts.method == StochasticMethod::gillespie
                      ? gillespie_run(pop0, params, g, opts.t_end, opts.sample_interval, seed)
                      : fixed_step_run(pop0, params, g, opts.t_end, opts.dt, opts.sample_interval, seed);
    };
    std::size_t threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, opts.replicas);
    if (threads == 1) {
        for (std::size_t r = 0; r < opts.replicas; ++r) one(r);
        return runs;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < opts.replicas; r = next++) {
                    try {
                        one(r);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                        return;
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
    return runs;
}

EnsembleResult ensemble_average(std::span<const PopulationTrajectory> runs, std::uint64_t seed) {
    if (runs.empty()) throw Error(ErrorKind::InvalidArgument, "no runs to average");
    const auto& grid = runs.front().times;
    for (const auto& run : runs)
        if (run.times != grid || run.samples.size() != grid.size())
            throw Error(ErrorKind::GridMismatch, "replicas do not share a sample grid");
    const std::size_t n = runs.front().samples.front().size();
    const auto nn = static_cast<Eigen::Index>(n);

    EnsembleResult res;
    res.times = grid;
    res.replicas = runs.size();
    res.seed = seed;
    res.mean_p.assign(grid.size(), Vector::Zero(nn));
    res.mean_x.assign(grid.size(), Vector::Zero(nn));
    res.missing.assign(grid.size(), std::vector<std::size_t>(n, 0));
    for (std::size_t t = 0; t < grid.size(); ++t) {
        Vector& mp = res.mean_p[t];
        Vector& mx = res.mean_x[t];
        std::vector<std::size_t> present(n, 0);
        for (const auto& run : runs) {
            const Population& pop = run.samples[t];
            if (pop.size() != n) throw Error(ErrorKind::GridMismatch, "replicas differ in node count");
            const auto total = static_cast<double>(pop.total());
            for (std::size_t k = 0; k < n; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                const std::int64_t size = pop.s[k] + pop.i[k];
                mx[kk] += static_cast<double>(size) / total;
                if (size == 0) {
                    ++res.missing[t][k];
                    continue;
                }
                mp[kk] += static_cast<double>(pop.i[k]) / static_cast<double>(size);
                ++present[k];
            }
        }
        mx /= static_cast<double>(runs.size());
        for (std::size_t k = 0; k < n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            mp[kk] = present[k] > 0 ? mp[kk] / static_cast<double>(present[k])
                                    : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return res;
}

}  // namespace epimob
