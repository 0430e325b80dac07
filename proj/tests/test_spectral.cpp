#include "epimob/error.hpp"
#include "epimob/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace epimob;
using epimob::testing::Gen;

namespace {

MobilityLaplacian lstar_of(const GeneratorMatrix& g) { return mobility_laplacian(g, stationary_distribution(g)); }

}  // namespace

TEST_CASE("spectral abscissa examples") {
    Matrix one(1, 1);
    one << 0.2;
    const auto p = spectral_abscissa(one);
    CHECK(p.value == doctest::Approx(0.2));
    CHECK(p.vector[0] == doctest::Approx(1.0));

    Gen gen(3);
    const auto g = gen.irreducible_generator(6);
    const auto pair = spectral_abscissa(-lstar_of(g).matrix());
    CHECK(std::abs(pair.value) <= 1e-12);
    CHECK((pair.vector.array() > 0.0).all());

    Matrix bad(2, 2);
    bad << 0.0, -1.0, 1.0, 0.0;
    CHECK_THROWS_AS(spectral_abscissa(bad), Error);
    Matrix reducible(2, 2);
    reducible << 0.0, 1.0, 0.0, 0.0;
    try {
        spectral_abscissa(reducible);
        FAIL("accepted a reducible matrix");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotIrreducible);
    }
}

TEST_CASE("spectral abscissa property against the dense eigensolver") {
    Gen gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix m = gen.metzler(gen.index(1, 8));
        const auto pair = spectral_abscissa(m);
        CHECK(std::abs(pair.value - testing::oracle_abscissa(m)) <= 1e-9);
        CHECK((pair.vector.array() > 0.0).all());
        CHECK(pair.vector.sum() == doctest::Approx(1.0));
        CHECK((m * pair.vector - pair.value * pair.vector).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("reproduction number") {
    const auto solo = GeneratorMatrix::validate(Matrix::Zero(1, 1));
    CHECK(reproduction_number(EpidemicParams::uniform(1, 0.3, 0.1), lstar_of(solo)) == doctest::Approx(3.0));

    Gen gen(19);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = gen.index(1, 8);
        const auto g = gen.irreducible_generator(n);
        const Vector beta = gen.vector(n, 0.1, 1.0);
        const EpidemicParams params(beta, beta);
        const auto lstar = lstar_of(g);
        CHECK(reproduction_number(params, lstar) <= 1.0 + 1e-9);
        CHECK(spectral_abscissa(infection_jacobian(params, lstar)).value <= 1e-10);
    }
    try {
        reproduction_number(EpidemicParams::uniform(2, 0.3, 0.0), lstar_of(uniform_out_rates(make_graph(GraphKind::line, 2), 0.2)));
        FAIL("no recovery accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularMMatrix);
    }
}

TEST_CASE("threshold equivalence property") {
    Gen gen(23);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen.index(1, 8);
        const auto g = gen.irreducible_generator(n);
        const auto params = gen.params(n);
        const auto lstar = lstar_of(g);
        const double mu = spectral_abscissa(infection_jacobian(params, lstar)).value;
        const double r0 = reproduction_number(params, lstar);
        CHECK(std::abs(r0 - testing::oracle_radius(next_generation_matrix(params, lstar))) <= 1e-9 * std::max(1.0, r0));
        if (std::abs(r0 - 1.0) > 1e-8) {
            ++compared;
            CHECK((mu > 0.0) == (r0 > 1.0));
        }
    }
    CHECK(compared > 150);
}

TEST_CASE("weighted lambda2") {
    for (std::size_t n : {3u, 5u, 20u}) {
        const auto g = uniform_out_rates(make_graph(GraphKind::complete, n), 0.2);
        const double expect = 0.2 + 0.2 / static_cast<double>(n - 1);
        const auto v = stationary_distribution(g);
        CHECK(lambda2_weighted(mobility_laplacian(g, v), v) == doctest::Approx(expect).epsilon(1e-12));
    }
    const auto pair = uniform_out_rates(make_graph(GraphKind::line, 2), 0.2);
    const auto v2 = stationary_distribution(pair);
    CHECK(lambda2_weighted(mobility_laplacian(pair, v2), v2) == doctest::Approx(0.4));
    CHECK(m_lower_bound(pair) == doctest::Approx(-0.4 / 9.0));

    const auto c20 = uniform_out_rates(make_graph(GraphKind::complete, 20), 0.2);
    const auto v20 = stationary_distribution(c20);
    CHECK(std::abs(lambda2_weighted(mobility_laplacian(c20, v20), v20) - 0.2105) <= 1e-4);
    CHECK(std::abs(m_lower_bound(c20) + 0.0026) <= 1e-4);

    const auto solo = GeneratorMatrix::validate(Matrix::Zero(1, 1));
    CHECK(m_lower_bound(solo) == 0.0);
}

TEST_CASE("weighted spectrum property") {
    Gen gen(29);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.index(2, 9);
        const auto g = gen.irreducible_generator(n);
        const auto v = stationary_distribution(g);
        const auto lstar = mobility_laplacian(g, v);
        const Vector spec = weighted_symmetric_spectrum(lstar, v);
        CHECK(std::abs(spec[0]) <= 1e-10);
        CHECK(spec[1] > 0.0);
        CHECK(m_lower_bound(g) < 0.0);

        // independent symmetrization from scratch
        const Vector w = v.values() / v.values().maxCoeff();
        const Eigen::MatrixXd wl = w.asDiagonal() * Eigen::MatrixXd(lstar.matrix());
        const Eigen::MatrixXd s = 0.5 * (wl + wl.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        CHECK(std::abs(spec[1] - es.eigenvalues()[1]) <= 1e-12);
    }
}

TEST_CASE("stability conditions") {
    const auto g = uniform_out_rates(make_graph(GraphKind::line, 6), 0.2);
    Vector beta = Vector::Constant(6, 0.3);
    Vector delta = Vector::Constant(6, 0.35);
    auto c = corollary_conditions(EpidemicParams(beta, delta), g);
    CHECK(c.necessary_exit_rate);
    CHECK(c.necessary_some_node);
    CHECK(c.sufficient_every_node);
    CHECK(c.sufficient_mobility);

    // one node whose deficit exceeds its exit rate
    delta[2] = 0.05;
    const EpidemicParams violating(beta, delta);
    c = corollary_conditions(violating, g);
    CHECK_FALSE(c.necessary_exit_rate);
    const auto report = classify(violating, g);
    CHECK(report.mu > 0.0);
    CHECK(report.verdict == Verdict::EndemicStable);

    // all slack at its minimum: condition (iv) reads m >= 0
    c = corollary_conditions(EpidemicParams::uniform(6, 0.3, 0.3), g);
    CHECK(c.sufficient_mobility);
    c = corollary_conditions(EpidemicParams::uniform(6, 0.3, 0.29), g);
    CHECK_FALSE(c.sufficient_mobility);
}

TEST_CASE("closed-form recovery rates meet condition (iv) with equality") {
    const auto g = uniform_out_rates(make_graph(GraphKind::complete, 20), 0.2);
    const double m = 0.8 * m_lower_bound(g);
    const Vector beta = Vector::Constant(20, 0.3);
    const Vector delta = recovery_rates_for_mobility_condition(beta, g, m, {0, 19});
    CHECK(std::abs(delta[0] - 0.2979) <= 1e-4);
    CHECK(std::abs(delta[19] - 0.2979) <= 1e-4);
    for (int i = 1; i < 19; ++i) CHECK(std::abs(delta[i] - 0.3198) <= 2e-4);
    const auto report = classify(EpidemicParams(beta, delta), g);
    CHECK(std::abs(report.conditions.mobility_margin) <= 1e-12);
    CHECK(report.conditions.sufficient_mobility);
    CHECK(report.verdict == Verdict::DiseaseFreeStable);
    CHECK(report.r0.has_value());
    CHECK(*report.r0 < 1.0);

    CHECK_THROWS_AS(recovery_rates_for_mobility_condition(beta, g, 2.0 * m_lower_bound(g), {0}), Error);
    CHECK_THROWS_AS(recovery_rates_for_mobility_condition(beta, g, 0.01, {0}), Error);
}

TEST_CASE("classification consistency properties") {
    Gen gen(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = gen.index(1, 8);
        const auto g = gen.irreducible_generator(n);
        Vector beta = gen.vector(n, 0.05, 1.0);
        Vector delta = gen.vector(n, 0.0, 1.0);
        if (gen.coin(0.3)) delta = beta + gen.vector(n, 0.0, 0.2);
        const EpidemicParams params(beta, delta);
        const auto r = classify(params, g);
        CHECK((r.verdict == Verdict::DiseaseFreeStable) == (r.mu <= 0.0));
        if (r.conditions.sufficient_every_node) CHECK(r.mu <= 1e-10);
        if (r.verdict == Verdict::DiseaseFreeStable) {
            CHECK(r.conditions.necessary_exit_rate);
            CHECK(r.conditions.necessary_some_node);
        }
        if (r.conditions.sufficient_mobility) CHECK(r.mu <= 1e-8);
        CHECK(r.lambda2 >= 0.0);
    }
}

TEST_CASE("condition (iv) sufficiency on instances built to satisfy it") {
    Gen gen(37);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.index(2, 10);
        const auto g = gen.irreducible_generator(n);
        const double ml = m_lower_bound(g);
        const Vector beta = gen.vector(n, 0.1, 1.0);
        const double m = gen.uniform(0.05, 0.95) * ml;
        const Vector delta = recovery_rates_for_mobility_condition(beta, g, m, {gen.index(0, n - 1)});
        const auto r = classify(EpidemicParams(beta, delta), g);
        CHECK(r.conditions.sufficient_mobility);
        CHECK(r.mu <= 1e-8);
        CHECK(r.m == doctest::Approx(m));
    }
}
