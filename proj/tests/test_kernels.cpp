#include "epimob/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace epimob::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& e : v) e = d(rng);
    return v;
}

// Relative closeness allowing for FMA contraction and lane-wise reassociation.
void check_close(const std::vector<double>& a, const std::vector<double>& b, double scale) {
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-13 * scale);
}

}  // namespace

TEST_CASE("scalar table is always present and dispatch reports a usable isa") {
    CHECK(scalar_table().isa == Isa::scalar);
    CHECK(isa_available(Isa::scalar));
    CHECK(isa_available(active().isa));
    CHECK(isa_name(Isa::scalar) == "scalar");
    CHECK(set_isa(active().isa));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const KernelTable* v = avx2_table();
    if (v == nullptr) {
        MESSAGE("AVX2 not available on this host; equivalence skipped");
        return;
    }
    const KernelTable& s = scalar_table();
    std::mt19937_64 rng(42);
    for (std::size_t n = 0; n <= 67; ++n) {
        CAPTURE(n);
        auto a = random_vec(rng, n), b = random_vec(rng, n);
        const double scale = 4.0 * static_cast<double>(n + 1);

        CHECK(std::abs(s.dot(a.data(), b.data(), n) - v->dot(a.data(), b.data(), n)) <= 1e-13 * scale);
        CHECK(s.max_abs_diff(a.data(), b.data(), n) == v->max_abs_diff(a.data(), b.data(), n));
        CHECK(s.max_abs(a.data(), n) == v->max_abs(a.data(), n));

        std::vector<double> y1 = b, y2 = b;
        s.axpy(0.37, a.data(), y1.data(), n);
        v->axpy(0.37, a.data(), y2.data(), n);
        check_close(y1, y2, 4.0);

        std::vector<double> o1(n), o2(n);
        s.shifted(b.data(), -1.25, a.data(), o1.data(), n);
        v->shifted(b.data(), -1.25, a.data(), o2.data(), n);
        check_close(o1, o2, 4.0);

        s.hadamard(a.data(), b.data(), o1.data(), n);
        v->hadamard(a.data(), b.data(), o2.data(), n);
        check_close(o1, o2, 1.0);

        auto k1 = random_vec(rng, n), k2 = random_vec(rng, n), k3 = random_vec(rng, n), k4 = random_vec(rng, n);
        s.rk4_combine(a.data(), k1.data(), k2.data(), k3.data(), k4.data(), 0.01, o1.data(), n);
        v->rk4_combine(a.data(), k1.data(), k2.data(), k3.data(), k4.data(), 0.01, o2.data(), n);
        check_close(o1, o2, 4.0);

        auto p = random_vec(rng, n, 0.0, 1.0), x = random_vec(rng, n, 0.01, 1.0);
        auto beta = random_vec(rng, n, 0.0, 1.0), delta = random_vec(rng, n, 0.0, 1.0);
        auto fp = random_vec(rng, n), fx = random_vec(rng, n);
        s.sis_reaction(p.data(), x.data(), beta.data(), delta.data(), fp.data(), fx.data(), o1.data(), n);
        v->sis_reaction(p.data(), x.data(), beta.data(), delta.data(), fp.data(), fx.data(), o2.data(), n);
        check_close(o1, o2, 1000.0);

        if (n > 0) {
            auto den = random_vec(rng, n, 0.1, 1.0);
            double lo1, hi1, lo2, hi2;
            s.ratio_bounds(a.data(), den.data(), n, &lo1, &hi1);
            v->ratio_bounds(a.data(), den.data(), n, &lo2, &hi2);
            CHECK(lo1 == lo2);
            CHECK(hi1 == hi2);
        }

        for (std::size_t rows : {std::size_t{1}, std::size_t{3}, n + 1}) {
            auto m = random_vec(rng, rows * n);
            std::vector<double> r1(rows), r2(rows), r3(rows), r4(rows);
            s.matvec(m.data(), rows, n, a.data(), r1.data());
            v->matvec(m.data(), rows, n, a.data(), r2.data());
            check_close(r1, r2, scale);
            s.matvec2(m.data(), rows, n, a.data(), b.data(), r1.data(), r3.data());
            v->matvec2(m.data(), rows, n, a.data(), b.data(), r2.data(), r4.data());
            check_close(r1, r2, scale);
            check_close(r3, r4, scale);
        }
    }
}

TEST_CASE("scalar kernels match direct arithmetic") {
    const KernelTable& s = scalar_table();
    const double a[3] = {1.0, 2.0, 3.0}, b[3] = {4.0, -5.0, 6.0};
    CHECK(s.dot(a, b, 3) == doctest::Approx(12.0));
    const double m[6] = {1, 2, 3, 4, 5, 6};
    double y[2];
    s.matvec(m, 2, 3, a, y);
    CHECK(y[0] == 14.0);
    CHECK(y[1] == 32.0);
    double lo, hi;
    s.ratio_bounds(a, a, 3, &lo, &hi);
    CHECK(lo == 1.0);
    CHECK(hi == 1.0);
    CHECK(s.max_abs(b, 3) == 6.0);
}
