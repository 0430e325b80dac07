#include "epimob/dynamics.hpp"

#include "epimob/error.hpp"
#include "epimob/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epimob {

namespace {

constexpr double kBoxSlack = 1e-9;

// Joint state y = [p; x] of length 2n with preallocated stage buffers.
class Rk4Integrator {
public:
    Rk4Integrator(const EpidemicParams& params, const GeneratorMatrix& g)
        : params_(params),
          g_(g),
          n_(g.size()),
          k1_(2 * n_),
          k2_(2 * n_),
          k3_(2 * n_),
          k4_(2 * n_),
          stage_(2 * n_),
          px_(n_),
          flow_p_(n_) {}

    std::size_t dim() const { return 2 * n_; }

    // f(y) -> out
    void eval(const double* y, double* out) {
        const auto& k = kernels::active();
        const double* p = y;
        const double* x = y + n_;
        for (std::size_t i = 0; i < n_; ++i)
            if (!(x[i] > 0.0))
                throw Error(ErrorKind::ZeroPopulationEntry,
                            "population fraction at node " + std::to_string(i) + " reached zero", i);
        k.hadamard(x, p, px_.data(), n_);
        double* flow_x = out + n_;
        k.matvec2(g_.qt().data(), n_, n_, x, px_.data(), flow_x, flow_p_.data());
        k.sis_reaction(p, x, params_.beta().data(), params_.delta().data(), flow_p_.data(),
                       flow_x, out, n_);
    }

    // One RK4 step of size h; k1 must already hold f(y).
    void step_with_k1(std::vector<double>& y, double h) {
        const auto& k = kernels::active();
        const std::size_t d = dim();
        k.shifted(y.data(), 0.5 * h, k1_.data(), stage_.data(), d);
        eval(stage_.data(), k2_.data());
        k.shifted(y.data(), 0.5 * h, k2_.data(), stage_.data(), d);
        eval(stage_.data(), k3_.data());
        k.shifted(y.data(), h, k3_.data(), stage_.data(), d);
        eval(stage_.data(), k4_.data());
        k.rk4_combine(y.data(), k1_.data(), k2_.data(), k3_.data(), k4_.data(), h, y.data(), d);
    }

    void step(std::vector<double>& y, double h) {
        eval(y.data(), k1_.data());
        step_with_k1(y, h);
    }

    // ||dp||_inf + ||dx||_inf at y; leaves f(y) in k1 for reuse.
    double field_norm(const std::vector<double>& y) {
        eval(y.data(), k1_.data());
        const auto& k = kernels::active();
        return k.max_abs(k1_.data(), n_) + k.max_abs(k1_.data() + n_, n_);
    }

    // Enforces the box on p; returns true if anything was clipped.
    bool clip(std::vector<double>& y, double t) const {
        bool clipped = false;
        for (std::size_t i = 0; i < n_; ++i) {
            double& p = y[i];
            if (!(p >= -kBoxSlack && p <= 1.0 + kBoxSlack))
                throw Error(ErrorKind::StateEscapedBox,
                            "p[" + std::to_string(i) + "] = " + std::to_string(p) + " at t = " +
                                std::to_string(t) + " left [0, 1]; reduce dt",
                            i);
            if (p < 0.0) {
                p = 0.0;
                clipped = true;
            } else if (p > 1.0) {
                p = 1.0;
                clipped = true;
            }
        }
        return clipped;
    }

private:
    const EpidemicParams& params_;
    const GeneratorMatrix& g_;
    std::size_t n_;
    std::vector<double> k1_, k2_, k3_, k4_, stage_, px_, flow_p_;
};

std::vector<double> pack(const ModelState& s) {
    std::vector<double> y(2 * s.size());
    std::copy(s.p.data(), s.p.data() + s.p.size(), y.begin());
    std::copy(s.x.data(), s.x.data() + s.x.size(), y.begin() + s.p.size());
    return y;
}

ModelState unpack(const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(y.size() / 2);
    ModelState s;
    s.p = Eigen::Map<const Vector>(y.data(), n);
    s.x = Eigen::Map<const Vector>(y.data() + n, n);
    return s;
}

void check_sizes(const ModelState& s, const EpidemicParams& params, const GeneratorMatrix& g) {
    if (s.p.size() != s.x.size() || s.size() != g.size() || params.size() != g.size())
        throw Error(ErrorKind::InvalidArgument, "state, parameter and generator sizes differ");
}

}  // namespace

void validate_state(const ModelState& s) {
    if (s.p.size() == 0 || s.p.size() != s.x.size())
        throw Error(ErrorKind::InvalidArgument, "p and x must be non-empty and of equal length");
    for (Eigen::Index i = 0; i < s.p.size(); ++i)
        if (!(s.p[i] >= 0.0 && s.p[i] <= 1.0))
            throw Error(ErrorKind::InvalidArgument,
                        "p[" + std::to_string(i) + "] outside [0, 1]", static_cast<std::size_t>(i));
    PopulationDistribution check(s.x);
}

StateDerivative rhs(const ModelState& state, const EpidemicParams& params, const GeneratorMatrix& g) {
    check_sizes(state, params, g);
    Rk4Integrator f(params, g);
    const std::vector<double> y = pack(state);
    std::vector<double> out(y.size());
    f.eval(y.data(), out.data());
    const auto n = static_cast<Eigen::Index>(state.size());
    return {Eigen::Map<const Vector>(out.data(), n), Eigen::Map<const Vector>(out.data() + n, n)};
}

Trajectory integrate(const ModelState& initial, const EpidemicParams& params,
                     const GeneratorMatrix& g, const IntegrationOptions& opts) {
    check_sizes(initial, params, g);
    validate_state(initial);
    if (!(opts.dt > 0.0) || !std::isfinite(opts.dt))
        throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    if (!(opts.t_end >= 0.0) || !std::isfinite(opts.t_end))
        throw Error(ErrorKind::InvalidArgument, "t_end must be nonnegative");
    const std::size_t stride = std::max<std::size_t>(1, opts.output_stride);

    Trajectory traj{{}, {}, params, g, 0};
    Rk4Integrator rk(params, g);
    std::vector<double> y = pack(initial);
    traj.times.push_back(0.0);
    traj.states.push_back(initial);

    // Steps are placed at k * dt; the last one is shortened to hit t_end.
    const auto full_steps = static_cast<std::size_t>(std::floor(opts.t_end / opts.dt * (1.0 + 1e-12)));
    std::size_t k = 0;
    double t = 0.0;
    while (t < opts.t_end) {
        const double next = (k + 1 <= full_steps) ? static_cast<double>(k + 1) * opts.dt : opts.t_end;
        const double t_next = std::min(next, opts.t_end);
        const double h = t_next - t;
        if (!(h > 0.0)) break;
        rk.step(y, h);
        if (rk.clip(y, t_next)) ++traj.clipped_steps;
        ++k;
        t = t_next;
        const bool last = !(t < opts.t_end) || (opts.t_end - t) <= 1e-12 * opts.dt;
        if (last) t = opts.t_end;
        if (k % stride == 0 || last) {
            traj.times.push_back(t);
            traj.states.push_back(unpack(y));
        }
    }
    return traj;
}

LimitResult limit_state(const GeneratorMatrix& g, const EpidemicParams& params,
                        const ModelState& initial, const LimitOptions& opts) {
    check_sizes(initial, params, g);
    validate_state(initial);
    if (!(opts.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    Rk4Integrator rk(params, g);
    std::vector<double> y = pack(initial);
    std::size_t k = 0;
    double t = 0.0;
    while (true) {
        if (rk.field_norm(y) < opts.tol) return {unpack(y), t, true};
        if (t >= opts.t_max) return {unpack(y), t, false};
        rk.step_with_k1(y, opts.dt);
        rk.clip(y, t);
        ++k;
        t = static_cast<double>(k) * opts.dt;
    }
}

}  // namespace epimob
