#include "epimob/error.hpp"
#include "epimob/mobility_graph.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace epimob;
using epimob::testing::Gen;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an epimob::Error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("generator validation") {
    CHECK_NOTHROW(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.1, -0.1}})));
    CHECK_NOTHROW(GeneratorMatrix::validate(mat({{0.0}})));
    try {
        GeneratorMatrix::validate(mat({{-0.2, 0.1}, {0.1, -0.1}}));
        FAIL("accepted a bad row sum");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonzeroRowSum);
        CHECK(e.index() == std::optional<std::size_t>(0));
    }
    try {
        GeneratorMatrix::validate(mat({{0.1, -0.1}, {0.1, -0.1}}));
        FAIL("accepted a negative rate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeOffDiagonal);
        CHECK(e.index() == std::optional<std::size_t>(0));
    }
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.1, -0.1}}))));
    CHECK_FALSE(is_irreducible(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.0, 0.0}}))));
    CHECK(is_irreducible(uniform_out_rates(make_graph(GraphKind::line, 20), 0.2)));
    CHECK(is_irreducible(GeneratorMatrix::validate(mat({{0.0}}))));
}

TEST_CASE("graph builders") {
    const auto line = make_graph(GraphKind::line, 3);
    CHECK(line.edges() == std::vector<Edge>{{0, 1}, {1, 0}, {1, 2}, {2, 1}});
    const auto complete = make_graph(GraphKind::complete, 3);
    CHECK(complete.edges().size() == 6);
    const auto star = make_graph(GraphKind::star, 4);
    CHECK(star.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 0}, {3, 0}});
    const auto ring = make_graph(GraphKind::ring, 5);
    CHECK(ring.edges().size() == 10);
    CHECK(ring.has_edge(4, 0));
    for (auto k : {GraphKind::line, GraphKind::ring, GraphKind::star, GraphKind::complete}) {
        const auto g = make_graph(k, 7);
        CHECK(g.is_symmetric());
        CHECK(g.is_strongly_connected());
        CHECK(parse_graph_kind(to_string(k)) == k);
    }
    CHECK(kind_of([] { make_graph(GraphKind::line, 1); }) == ErrorKind::TooFewNodes);
    CHECK(kind_of([] { RegionGraph(2, {{0, 0}}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("uniform out-rates split nu over out-edges") {
    const auto ring = uniform_out_rates(make_graph(GraphKind::ring, 4), 0.2);
    for (const auto& e : ring.graph().edges()) CHECK(ring.rate(e.from, e.to) == doctest::Approx(0.1));
    const auto star = uniform_out_rates(make_graph(GraphKind::star, 3), 0.2);
    CHECK(star.rate(0, 1) == doctest::Approx(0.1));
    CHECK(star.rate(0, 2) == doctest::Approx(0.1));
    CHECK(star.rate(1, 0) == doctest::Approx(0.2));
    CHECK(star.rate(2, 0) == doctest::Approx(0.2));
    const auto pair = uniform_out_rates(make_graph(GraphKind::line, 2), 0.2);
    CHECK(pair.rate(0, 1) == doctest::Approx(0.2));
    CHECK(pair.rate(1, 0) == doctest::Approx(0.2));
    CHECK(pair.exit_rate(0) == doctest::Approx(0.2));
    CHECK(kind_of([] { uniform_out_rates(RegionGraph(2, {{0, 1}}), 0.2); }) == ErrorKind::IsolatedNode);
}

TEST_CASE("Metropolis-Hastings rates") {
    const auto c3 = metropolis_hastings_rates(make_graph(GraphKind::complete, 3), Vector::Constant(3, 1.0 / 3), 0.5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) CHECK(c3.rate(i, j) == doctest::Approx(c3.rate(0, 1)));

    const auto line = metropolis_hastings_rates(make_graph(GraphKind::line, 20), Vector::Constant(20, 0.05), 1.0);
    CHECK((stationary_distribution(line).values().array() - 0.05).abs().maxCoeff() <= 1e-10);

    Vector t(2);
    t << 1.0 / 3, 2.0 / 3;
    const auto two = metropolis_hastings_rates(make_graph(GraphKind::line, 2), t, 0.3);
    CHECK(std::abs(t[0] * two.rate(0, 1) - t[1] * two.rate(1, 0)) <= 1e-15);

    CHECK(kind_of([] { metropolis_hastings_rates(RegionGraph(2, {{0, 1}}), Vector::Constant(2, 0.5), 1.0); }) ==
          ErrorKind::AsymmetricGraph);
    CHECK(kind_of([] {
              Vector z(2);
              z << 1.0, 0.0;
              metropolis_hastings_rates(make_graph(GraphKind::line, 2), z, 1.0);
          }) == ErrorKind::ZeroTargetEntry);
}

TEST_CASE("Metropolis-Hastings property: detailed balance and stationarity") {
    Gen gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.index(2, 12);
        const auto kind = static_cast<GraphKind>(gen.index(0, 3));
        Vector target = gen.vector(n, 0.1, 2.0);
        target /= target.sum();
        const auto g = metropolis_hastings_rates(make_graph(kind, n), target, gen.uniform(0.1, 2.0));
        for (const auto& e : g.graph().edges())
            CHECK(std::abs(target[e.from] * g.rate(e.from, e.to) - target[e.to] * g.rate(e.to, e.from)) <= 1e-12);
        CHECK((stationary_distribution(g).values() - target).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("stationary distribution") {
    auto v = stationary_distribution(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.2, -0.2}})));
    CHECK(v[0] == doctest::Approx(0.5));
    v = stationary_distribution(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.1, -0.1}})));
    CHECK(v[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    v = stationary_distribution(uniform_out_rates(make_graph(GraphKind::complete, 20), 0.2));
    CHECK((v.values().array() - 0.05).abs().maxCoeff() <= 1e-14);
    CHECK(kind_of([] { stationary_distribution(GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.0, 0.0}}))); }) ==
          ErrorKind::NotIrreducible);
}

TEST_CASE("stationary distribution property against the SVD null space") {
    Gen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen.index(1, 8);
        const auto g = gen.irreducible_generator(n);
        const auto v = stationary_distribution(g);
        CHECK((v.values().array() > 0.0).all());
        CHECK((g.q().transpose() * v.values()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((v.values() - testing::oracle_stationary(g.q())).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("mobility Laplacian") {
    const auto g = GeneratorMatrix::validate(mat({{-0.2, 0.2}, {0.1, -0.1}}));
    const auto l = mobility_laplacian(g, stationary_distribution(g)).matrix();
    CHECK(l(0, 0) == doctest::Approx(0.2));
    CHECK(l(0, 1) == doctest::Approx(-0.2));
    CHECK(l(1, 0) == doctest::Approx(-0.1));
    CHECK(l(1, 1) == doctest::Approx(0.1));
    CHECK(mobility_laplacian(GeneratorMatrix::validate(mat({{0.0}})), Vector::Ones(1)).matrix()(0, 0) == 0.0);
    CHECK(kind_of([&] { mobility_laplacian(g, Vector::Zero(2)); }) == ErrorKind::ZeroPopulationEntry);
}

TEST_CASE("mobility Laplacian properties") {
    Gen gen(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.index(1, 10);
        const auto g = gen.irreducible_generator(n);
        Vector x = gen.vector(n, 0.05, 1.0);
        x /= x.sum();
        const Matrix l = mobility_laplacian(g, x).matrix();
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            for (Eigen::Index j = 0; j < l.cols(); ++j)
                if (i != j) CHECK(l(i, j) <= 0.0);
        CHECK(g.q().rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);

        const auto v = stationary_distribution(g);
        const Matrix lstar = mobility_laplacian(g, v).matrix();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(lstar(i, i) - g.exit_rate(i)) <= 1e-12 * std::max(1.0, g.exit_rate(i)));
        CHECK((v.values().transpose() * lstar).cwiseAbs().maxCoeff() <= 1e-10);
    }
}
