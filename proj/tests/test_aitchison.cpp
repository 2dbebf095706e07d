#include "looplab/aitchison.hpp"
#include "looplab/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace looplab;
using namespace looplab::aitchison;
using Catch::Approx;

namespace {

Composition random_composition(std::mt19937_64& g, int m, double spread = 3.0) {
    Eigen::VectorXd v(m);
    std::uniform_real_distribution<double> u(-spread, spread);
    for (int i = 0; i < m; ++i) v(i) = std::exp(u(g));
    return Composition(v / v.sum());
}

} // namespace

TEST_CASE("composition validation") {
    CHECK_THROWS_AS(Composition(Eigen::VectorXd::Constant(1, 1.0)), std::invalid_argument);
    Eigen::VectorXd neg(2);
    neg << 1.2, -0.2;
    CHECK_THROWS_AS(Composition(neg), std::invalid_argument);
    Eigen::VectorXd offsum(2);
    offsum << 0.6, 0.5;
    CHECK_THROWS_AS(Composition(offsum), std::invalid_argument);
}

TEST_CASE("helmert basis is orthonormal and zero-sum") {
    for (int m : {2, 3, 5, 9}) {
        auto H = helmert_basis(m);
        REQUIRE(H.rows() == m - 1);
        for (int i = 0; i < m - 1; ++i) {
            CHECK(std::abs(H.row(i).sum()) < 1e-12);
            for (int j = 0; j < m - 1; ++j) {
                const double expected = (i == j) ? 1.0 : 0.0;
                CHECK(H.row(i).dot(H.row(j)) == Approx(expected).margin(1e-12));
            }
        }
    }
}

TEST_CASE("clr basics") {
    CHECK(clr(Composition::uniform(3)).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXd p(3);
    p << 0.8, 0.1, 0.1;
    const double c = (std::log(0.8) + 2 * std::log(0.1)) / 3.0;
    auto v = clr(Composition(p));
    CHECK(v(0) == Approx(std::log(0.8) - c));
    CHECK(v(1) == Approx(std::log(0.1) - c));
    CHECK(std::abs(v.sum()) < 1e-14);

    auto g = make_stream(1, 0);
    for (int t = 0; t < 1000; ++t)
        CHECK(std::abs(clr(random_composition(g, 4)).sum()) < 1e-12);
}

TEST_CASE("ilr of the uniform composition is zero; m=2 closed form") {
    CHECK(ilr(Composition::uniform(4)).norm() < 1e-14);

    Eigen::VectorXd p(2);
    p << 0.8, 0.2;
    auto y = ilr(Composition(p));
    REQUIRE(y.size() == 1);
    CHECK(y(0) == Approx(std::log(4.0) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ilr is an isometry") {
    auto g = make_stream(2, 0);
    for (int t = 0; t < 1000; ++t) {
        const int m = 2 + int(t % 5);
        auto p = random_composition(g, m);
        auto q = random_composition(g, m);
        const double lhs = (ilr(p) - ilr(q)).norm();
        const double rhs = distance(p, q);
        if (rhs > 1e-12) CHECK(std::abs(lhs - rhs) / rhs < 1e-10);
        CHECK(ilr(p).dot(ilr(q)) == Approx(inner(p, q)).margin(1e-10));
    }
}

TEST_CASE("ilr_inverse round trips") {
    CHECK((ilr_inverse(Eigen::VectorXd::Zero(2), 3).vec() -
           Composition::uniform(3).vec()).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXd y1(1);
    y1 << std::log(4.0) / std::sqrt(2.0);
    auto p = ilr_inverse(y1, 2);
    CHECK(p[0] == Approx(0.8).epsilon(1e-12));
    CHECK(p[1] == Approx(0.2).epsilon(1e-12));

    auto g = make_stream(3, 0);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int t = 0; t < 1000; ++t) {
        const int m = 2 + int(t % 4);
        Eigen::VectorXd y(m - 1);
        for (int i = 0; i < m - 1; ++i) y(i) = u(g);
        if (y.norm() > 20.0) y *= 20.0 / y.norm();
        auto comp = ilr_inverse(y, m);
        CHECK((ilr(comp) - y).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(comp.vec().minCoeff() > 0.0);
        CHECK(comp.vec().sum() == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("aitchison distance") {
    Eigen::VectorXd a(3), b(3);
    a << 0.8, 0.1, 0.1;
    b << 0.1, 0.8, 0.1;
    CHECK(distance(Composition(a), Composition(a)) == 0.0);
    CHECK(distance(Composition(a), Composition(b)) ==
          Approx(std::sqrt(2.0) * std::log(8.0)).epsilon(1e-12));
    CHECK_THROWS_AS(distance(Composition(a), Composition::uniform(4)), std::invalid_argument);
}

TEST_CASE("double-sum inner product matches the clr form") {
    auto g = make_stream(4, 0);
    for (int t = 0; t < 1000; ++t) {
        const int m = 2 + int(t % 4);
        auto p = random_composition(g, m);
        auto q = random_composition(g, m);
        CHECK(inner_double_sum(p, q) == Approx(inner(p, q)).margin(1e-10));
        // Cauchy-Schwarz
        CHECK(std::abs(inner(p, q)) <= norm(p) * norm(q) + 1e-12);
    }
    // any composition is orthogonal to the uniform one
    for (int t = 0; t < 20; ++t)
        CHECK(std::abs(inner(random_composition(g, 5), Composition::uniform(5))) < 1e-12);
}

TEST_CASE("metric axioms on random triples") {
    auto g = make_stream(5, 0);
    double worst = 0.0;
    for (int t = 0; t < 100000; ++t) {
        auto p = random_composition(g, 3), q = random_composition(g, 3), r = random_composition(g, 3);
        const double slack = distance(p, r) + distance(r, q) - distance(p, q);
        worst = std::min(worst, slack);
        CHECK(std::abs(distance(p, q) - distance(q, p)) < 1e-12);
    }
    CHECK(worst >= -1e-10);
}

TEST_CASE("boundary blow-up") {
    double prev = 0.0;
    for (int e = 1; e <= 8; ++e) {
        const double eps = std::pow(10.0, -e);
        Eigen::VectorXd p(2);
        p << eps, 1.0 - eps;
        const double d = distance(Composition(p), Composition::uniform(2));
        CHECK(d > prev);
        prev = d;
    }
    CHECK(prev > 10.0);  // well on its way to infinity
}
