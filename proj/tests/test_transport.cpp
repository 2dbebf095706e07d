#include "looplab/circuit.hpp"
#include "looplab/graph_metric.hpp"
#include "looplab/transport.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace looplab;
using namespace looplab::transport;
using Catch::Approx;

namespace {

FiniteMetricSpace gamma_space(int nu, int h) {
    const circuit::TreeTopology topo(nu, h);
    auto g = graph_metric::build_loop_graph(topo);
    auto m = graph_metric::compute_metrics(g);
    return FiniteMetricSpace(graph_metric::principal_submatrix(m.d, g.gamma));
}

FiniteMetricSpace random_euclidean_space(std::mt19937_64& g, int k) {
    Eigen::MatrixXd pts(k, 3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < 3; ++j) pts(i, j) = u(g);
    Eigen::MatrixXd d(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    d.diagonal().setZero();
    return FiniteMetricSpace(d);
}

DiscreteMeasure random_measure(std::mt19937_64& g, int k) {
    Eigen::VectorXd w(k);
    for (int i = 0; i < k; ++i) w(i) = uniform01(g) + 1e-3;
    return DiscreteMeasure(w / w.sum());
}

} // namespace

TEST_CASE("metric space validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(FiniteMetricSpace(bad), std::invalid_argument);
    Eigen::MatrixXd tri(3, 3);
    tri << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // 5 > 1 + 1
    CHECK_THROWS_AS(FiniteMetricSpace(tri), std::invalid_argument);
}

TEST_CASE("snowflake") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 4, 4, 0;
    FiniteMetricSpace space(d);
    CHECK(snowflake(space, 1.0).d(0, 1) == 4.0);
    CHECK(snowflake(space, 0.5).d(0, 1) == Approx(2.0));
    CHECK_THROWS_AS(snowflake(space, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(snowflake(space, 1.5), std::invalid_argument);

    // snowflaking preserves the triangle inequality on the loop-graph metric
    auto gs = gamma_space(2, 2);
    for (double alpha : {0.25, 0.5, 0.75})
        CHECK_NOTHROW(snowflake(gs, alpha));
}

TEST_CASE("wasserstein_alpha basic values") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 4, 4, 0;
    FiniteMetricSpace space(d);

    CHECK(wasserstein_alpha(DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 0), space, 0.5) ==
          Approx(0.0).margin(1e-15));
    CHECK(wasserstein_alpha(DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 1), space, 0.5) ==
          Approx(2.0).margin(1e-12));
    Eigen::VectorXd half(2);
    half << 0.5, 0.5;
    CHECK(wasserstein_alpha(DiscreteMeasure(half), DiscreteMeasure::dirac(2, 0), space, 0.5) ==
          Approx(1.0).margin(1e-12));
}

TEST_CASE("wasserstein_alpha symmetry and triangle inequality over random measures") {
    auto g = make_stream(21, 0);
    auto space = gamma_space(2, 3);
    const int k = int(space.size());
    for (int t = 0; t < 200; ++t) {
        auto a = random_measure(g, k), b = random_measure(g, k), c = random_measure(g, k);
        const double ab = wasserstein_alpha(a, b, space, 0.5);
        const double ba = wasserstein_alpha(b, a, space, 0.5);
        CHECK(std::abs(ab - ba) <= 1e-10);
        const double ac = wasserstein_alpha(a, c, space, 0.5);
        const double cb = wasserstein_alpha(c, b, space, 0.5);
        CHECK(ab <= ac + cb + 1e-8);
        CHECK(wasserstein_alpha(a, a, space, 0.5) <= 1e-12);
    }
}

TEST_CASE("kantorovich potential certifies the optimum") {
    auto g = make_stream(22, 0);
    auto space = gamma_space(2, 3);
    const int k = int(space.size());
    const double alpha = 0.5;
    const auto snow = snowflake(space, alpha);
    for (int t = 0; t < 50; ++t) {
        auto mu = random_measure(g, k), nu = random_measure(g, k);
        const auto plan = wasserstein_alpha_plan(mu, nu, space, alpha);
        const auto f = kantorovich_potential(plan, space, alpha);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                CHECK(std::abs(f(i) - f(j)) <= snow.d(i, j) + 1e-10);
        const double dual_value = f.dot(mu.w - nu.w);
        CHECK(dual_value == Approx(plan.cost).margin(1e-9));
        // plan marginals
        CHECK((plan.flow.rowwise().sum() - mu.w).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((plan.flow.colwise().sum().transpose() - nu.w).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("wasserstein_1d") {
    CHECK(wasserstein_1d({{0.0, 1.0}}, {{1.0, 1.0}}) == Approx(1.0));
    CHECK(wasserstein_1d({{0.0, 0.5}, {2.0, 0.5}}, {{0.0, 1.0}}) == Approx(1.0));
    CHECK_THROWS_AS(wasserstein_1d({{0.0, 0.4}}, {{0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("1-D CDF route agrees with the flow solver on random lines") {
    auto g = make_stream(23, 0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const int k = 2 + int(t % 29);
        std::vector<double> xs(k);
        std::set<double> used;
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (auto& x : xs) {
            do { x = u(g); } while (used.count(x));
            used.insert(x);
        }
        Eigen::MatrixXd d(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) d(i, j) = std::abs(xs[i] - xs[j]);
        d.diagonal().setZero();
        FiniteMetricSpace line(d);
        auto mu = random_measure(g, k), nu = random_measure(g, k);
        const double flow = wasserstein_alpha(mu, nu, line, 1.0);
        std::vector<std::pair<double, double>> a, b;
        for (int i = 0; i < k; ++i) {
            a.emplace_back(xs[i], mu.w(i));
            b.emplace_back(xs[i], nu.w(i));
        }
        worst = std::max(worst, std::abs(flow - wasserstein_1d(a, b)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("heuristic line embedding") {
    SECTION("two points embed isometrically") {
        Eigen::MatrixXd d(2, 2);
        d << 0, 3, 3, 0;
        auto emb = embed_line_heuristic(FiniteMetricSpace(d));
        CHECK(emb.distortion() == Approx(1.0).margin(1e-9));
    }
    SECTION("a line metric embeds with distortion 1") {
        Eigen::MatrixXd d(3, 3);
        d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
        auto emb = embed_line_heuristic(FiniteMetricSpace(d));
        CHECK(emb.distortion() == Approx(1.0).margin(1e-9));
    }
    SECTION("loop-graph computation nodes, quarter snowflake") {
        auto space = gamma_space(2, 2);
        auto snow = snowflake(space, 0.25);
        auto heur = embed_line_heuristic(snow);
        CHECK(std::isfinite(heur.distortion()));
        CHECK(heur.R > 0.0);
        auto brute = embed_line_bruteforce(snow);
        CHECK(brute.distortion() <= heur.distortion() + 1e-12);
        CHECK(heur.distortion() <= 1.1 * brute.distortion());
    }
}

TEST_CASE("brute-force line embedding") {
    SECTION("equilateral triangle has optimal distortion 2") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Constant(3, 3, 1.0);
        d.diagonal().setZero();
        auto emb = embed_line_bruteforce(FiniteMetricSpace(d));
        CHECK(emb.distortion() <= 2.0 + 1e-3);
        CHECK(emb.distortion() >= 2.0 - 1e-9);  // 2 is optimal for the equilateral metric
    }
    SECTION("two points") {
        Eigen::MatrixXd d(2, 2);
        d << 0, 1, 1, 0;
        CHECK(embed_line_bruteforce(FiniteMetricSpace(d)).distortion() == Approx(1.0).margin(1e-12));
    }
    SECTION("dominates the heuristic on random small spaces") {
        auto g = make_stream(24, 0);
        for (int t = 0; t < 10; ++t) {
            auto space = random_euclidean_space(g, 2 + int(t % 7));
            auto snow = snowflake(space, 0.5);
            CHECK(embed_line_bruteforce(snow).distortion() <=
                  embed_line_heuristic(snow).distortion() + 1e-12);
        }
    }
    SECTION("size cap") {
        auto g = make_stream(25, 0);
        auto space = random_euclidean_space(g, 9);
        CHECK_THROWS_AS(embed_line_bruteforce(space), std::invalid_argument);
    }
}

TEST_CASE("sandwich inequalities with measured constants") {
    auto g = make_stream(26, 0);
    auto space = gamma_space(2, 2);
    const double alpha = 0.5;
    auto emb = embed_line_heuristic(snowflake(space, alpha));

    SECTION("equal measures") {
        auto mu = random_measure(g, int(space.size()));
        auto rep = sandwich_check(space, alpha, mu, mu, emb);
        CHECK(rep.ok);
        CHECK(rep.w_alpha == Approx(0.0).margin(1e-12));
        CHECK(rep.w_line == Approx(0.0).margin(1e-12));
    }
    SECTION("random measure pairs") {
        for (int t = 0; t < 100; ++t) {
            auto mu = random_measure(g, int(space.size()));
            auto nu = random_measure(g, int(space.size()));
            auto rep = sandwich_check(space, alpha, mu, nu, emb);
            CHECK(rep.ok);
        }
    }
    SECTION("isometric embedding gives equality") {
        Eigen::MatrixXd d(3, 3);
        d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
        FiniteMetricSpace line_space(d);
        LineEmbedding iso;
        iso.coords = Eigen::VectorXd(3);
        iso.coords << 0, 1, 2;
        iso.R = iso.S = 1.0;
        auto mu = random_measure(g, 3), nu = random_measure(g, 3);
        auto rep = sandwich_check(line_space, 1.0, mu, nu, iso);
        CHECK(rep.ok);
        CHECK(rep.w_alpha == Approx(rep.w_line).margin(1e-10));
    }
}

TEST_CASE("pushforward weights stay a probability vector under tie perturbation") {
    auto space = gamma_space(2, 3);
    auto emb = embed_line_heuristic(snowflake(space, 0.5));
    std::set<double> coords;
    for (Eigen::Index i = 0; i < emb.coords.size(); ++i) coords.insert(emb.coords(i));
    CHECK(coords.size() == space.size());  // injective
}

TEST_CASE("empirical concentration of the transport distance") {
    // median of W_alpha(lambda, lambda_N) * sqrt(N) over seeds must not grow
    // systematically along the N grid
    auto space = gamma_space(2, 3);
    const int k = int(space.size());
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(k, 1.0 / k);
    DiscreteMeasure lambda(lam);
    const double alpha = 0.5;
    std::vector<std::size_t> Ns{16, 64, 256, 1024};
    std::vector<double> med;
    for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
        std::vector<double> vals;
        for (int seed = 0; seed < 200; ++seed) {
            auto g = make_stream(900 + seed, ni);
            std::vector<std::size_t> sample(Ns[ni]);
            std::uniform_int_distribution<int> pick(0, k - 1);
            for (auto& s : sample) s = pick(g);
            auto emp = DiscreteMeasure::from_counts(sample, k);
            vals.push_back(wasserstein_alpha(lambda, emp, space, alpha) * std::sqrt(double(Ns[ni])));
        }
        std::sort(vals.begin(), vals.end());
        med.push_back(vals[vals.size() / 2]);
    }
    for (std::size_t i = 0; i + 1 < med.size(); ++i) CHECK(med[i + 1] <= 1.2 * med[i]);
}
