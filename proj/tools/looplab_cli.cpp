// Single entry point for the numerical lab: graph geometry dumps, the
// generalization-gap experiment, the coupon-collector suite, and the
// self-test table of closed-form cross-checks.

#include "looplab/aitchison.hpp"
#include "looplab/circuit.hpp"
#include "looplab/experiment.hpp"
#include "looplab/graph_metric.hpp"
#include "looplab/io.hpp"
#include "looplab/probe.hpp"
#include "looplab/transport.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using looplab::io::format_double;
using looplab::io::json;

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("LOOPLAB_OUT_DIR")) return env;
    return "out";
}

struct CommonOpts {
    std::filesystem::path out = default_out_dir();
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    unsigned jobs = std::thread::hardware_concurrency();
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--seed", opts.seed, "Master seed override");
    cmd->add_option("--format", opts.format, "Matrix artifact format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", opts.jobs, "Worker threads (0 = all cores)");
}

json matrix_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// graph subcommand
// ---------------------------------------------------------------------------

int run_graph(int nu, int h, bool with_oracle, const std::string& method, std::size_t trials,
              const CommonOpts& opts) {
    using namespace looplab;
    const circuit::TreeTopology topo(nu, h);
    const auto g = graph_metric::build_loop_graph(topo);
    const auto hitting = method == "monte-carlo" ? graph_metric::HittingMethod::MonteCarlo
                                                 : graph_metric::HittingMethod::Exact;
    graph_metric::MonteCarloParams mc;
    mc.trials = trials;
    mc.seed = opts.seed.value_or(0);
    const auto m = graph_metric::compute_metrics(g, hitting, mc, opts.jobs);

    const auto diam = graph_metric::diameter(m.d);
    const Eigen::MatrixXd d_gamma = graph_metric::principal_submatrix(m.d, g.gamma);
    double min_gamma = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d_gamma.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d_gamma.cols(); ++j)
            min_gamma = std::min(min_gamma, d_gamma(i, j));
    const Eigen::MatrixXd lap_gamma = graph_metric::principal_submatrix(m.laplacian, g.gamma);

    io::RunManifest manifest("graph", "nu=" + std::to_string(nu) + ",h=" + std::to_string(h),
                             opts.seed.value_or(0));
    io::ArtifactWriter writer(opts.out, manifest);
    if (opts.format == "csv") {
        writer.emit("P.csv", io::matrix_csv(m.P));
        writer.emit("phi.csv", io::vector_csv(m.phi));
        writer.emit("Q.csv", io::matrix_csv(m.Q));
        writer.emit("E.csv", io::matrix_csv(m.E));
        writer.emit("d.csv", io::matrix_csv(m.d));
        writer.emit("delta.csv", io::matrix_csv(m.laplacian));
    } else {
        json all;
        all["P"] = matrix_json(m.P);
        all["phi"] = matrix_json(m.phi);
        all["Q"] = matrix_json(m.Q);
        all["E"] = matrix_json(m.E);
        all["d"] = matrix_json(m.d);
        all["delta"] = matrix_json(m.laplacian);
        writer.emit("matrices.json", all.dump(2) + "\n");
    }

    json summary;
    summary["k"] = g.size();
    summary["provenance"] = m.provenance;
    summary["diameter"] = diam.value;
    summary["diameter_pair"] = json::array({g.labels[diam.i], g.labels[diam.j]});
    summary["min_gamma_distance"] = min_gamma;
    summary["op_norms"] = {
        {"P", graph_metric::op_norm_inf(m.P)},
        {"P_transpose", graph_metric::op_norm_inf(Eigen::MatrixXd(m.P.transpose()))},
        {"laplacian", graph_metric::op_norm_inf(m.laplacian)},
        {"laplacian_gamma", graph_metric::op_norm_inf(lap_gamma)},
    };

    if (with_oracle) {
        const auto oracle = graph_metric::closed_form_oracle(nu, h);
        const double perron_dev = (m.phi - oracle.phi).cwiseAbs().maxCoeff();
        double base_pair_dev = 0.0;
        const std::size_t B = topo.base_count();
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t j = 0; j < B; ++j)
                if (i != j)
                    base_pair_dev = std::max(base_pair_dev,
                                             std::abs(m.Q(i, j) - oracle.hitting_base_pair(i, j)));
        json o;
        o["phi_root"] = oracle.phi_root;
        o["phi"] = matrix_json(oracle.phi);
        o["max_perron_deviation"] = perron_dev;
        o["max_base_hitting_deviation"] = base_pair_dev;
        o["diameter"] = oracle.diameter;
        o["diameter_deviation"] = std::abs(diam.value - oracle.diameter);
        o["min_gamma_distance_lower_bound"] = oracle.min_gamma_distance_lb;
        writer.emit("oracle.json", o.dump(2) + "\n");
        summary["max_perron_deviation"] = perron_dev;
    }
    writer.emit("summary.json", summary.dump(2) + "\n");
    writer.finalize();
    std::cout << "graph: k=" << g.size() << " diameter=" << format_double(diam.value) << " ("
              << g.labels[diam.i] << "," << g.labels[diam.j] << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// gap subcommand
// ---------------------------------------------------------------------------

looplab::experiment::GapConfig parse_gap_config(const json& j) {
    looplab::experiment::GapConfig c;
    c.nu = j.value("nu", c.nu);
    c.h = j.value("h", c.h);
    c.gate_preset = j.value("gate_preset", c.gate_preset);
    c.eta = j.value("eta", c.eta);
    c.alpha = j.value("alpha", c.alpha);
    c.loss_tag = j.value("loss", c.loss_tag);
    if (j.contains("weights")) c.sampler_weights = j["weights"].get<std::vector<double>>();
    if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::vector<std::size_t>>();
    c.delta = j.value("delta", c.delta);
    c.ensemble = j.value("ensemble", c.ensemble);
    c.L = j.value("L", c.L);
    c.p = j.value("p", c.p);
    if (j.contains("beta")) c.budgets = j["beta"].get<std::vector<double>>();
    if (j.contains("hidden_dims")) c.hidden_dims = j["hidden_dims"].get<std::vector<int>>();
    c.activation = j.value("activation", c.activation);
    c.seed = j.value("seed", c.seed);
    c.replications = j.value("replications", c.replications);
    return c;
}

int run_gap(const std::filesystem::path& config_path, const CommonOpts& opts) {
    using namespace looplab;
    json parsed = json::parse(io::read_file(config_path));
    experiment::GapConfig config = parse_gap_config(parsed);
    if (opts.seed) config.seed = *opts.seed;
    const auto result = experiment::run_gap_experiment(config, opts.jobs);

    json summary;
    summary["n_grid"] = result.n_grid;
    summary["quantile_level"] = 1.0 - config.delta;
    summary["gap_quantile"] = result.gap_quantile;
    summary["ratio_quantile"] = result.ratio_quantile;
    summary["slope"] = result.slope;
    summary["measured_probe_complexity"] = result.measured_k;
    summary["min_sampler_weight"] = result.min_weight;
    summary["sampler_warning"] = result.sampler_warning;
    if (result.sampler_warning)
        std::cerr << "warning: sampler puts less than 1/(10 #nodes) mass on some node\n";

    io::RunManifest manifest("gap", config_path.filename().string(), config.seed);
    io::ArtifactWriter writer(opts.out, manifest);
    if (opts.format == "csv") {
        std::ostringstream csv;
        csv << "N,seed,gap,rate_factor,ratio\n";
        for (const auto& cell : result.cells)
            csv << cell.n << ',' << cell.replication << ',' << format_double(cell.gap) << ','
                << format_double(cell.rate_factor) << ',' << format_double(cell.ratio) << '\n';
        writer.emit("gap.csv", csv.str());
    } else {
        json rows = json::array();
        for (const auto& cell : result.cells)
            rows.push_back({{"N", cell.n},
                            {"seed", cell.replication},
                            {"gap", cell.gap},
                            {"rate_factor", cell.rate_factor},
                            {"ratio", cell.ratio}});
        writer.emit("gap.json", rows.dump(2) + "\n");
    }
    writer.emit("summary.json", summary.dump(2) + "\n");
    writer.finalize();

    bool ok = std::isfinite(result.slope);
    for (const auto& cell : result.cells) ok = ok && cell.gap >= 0.0 && cell.rate_factor > 0.0;
    std::cout << "gap: slope=" << format_double(result.slope) << " (quantile level "
              << format_double(1.0 - config.delta) << ")\n";
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// coupon subcommand
// ---------------------------------------------------------------------------

int run_coupon(const std::filesystem::path& config_path, const CommonOpts& opts) {
    using namespace looplab;
    json parsed = json::parse(io::read_file(config_path));
    std::vector<double> weights;
    if (parsed.contains("weights")) {
        weights = parsed["weights"].get<std::vector<double>>();
    } else {
        const std::size_t k = parsed.at("k").get<std::size_t>();
        weights.assign(k, 1.0 / double(k));
    }
    std::vector<std::size_t> horizons;
    if (parsed.contains("horizons"))
        horizons = parsed["horizons"].get<std::vector<std::size_t>>();
    else
        horizons.push_back(parsed.at("horizon").get<std::size_t>());
    const std::size_t trials = parsed.value("trials", std::size_t{100000});
    std::uint64_t seed = parsed.value("seed", std::uint64_t{7});
    if (opts.seed) seed = *opts.seed;

    std::ostringstream csv;
    csv << "horizon,estimate,ci_lo,ci_hi,lower,upper,sharper\n";
    json rows = json::array();
    bool ok = true;
    for (std::size_t n : horizons) {
        experiment::CouponConfig cc;
        cc.weights = weights;
        cc.horizon = n;
        cc.trials = trials;
        cc.seed = seed;
        const auto est = experiment::coupon_simulate(cc);
        const auto bounds = experiment::coupon_bounds(weights, n);
        ok = ok && est.ci_high >= bounds.lower_clipped() && est.ci_low <= bounds.upper;
        csv << n << ',' << format_double(est.estimate) << ',' << format_double(est.ci_low) << ','
            << format_double(est.ci_high) << ',' << format_double(bounds.lower_clipped()) << ','
            << format_double(bounds.upper) << ',' << format_double(bounds.sharper_clipped()) << '\n';
        rows.push_back({{"horizon", n},
                        {"estimate", est.estimate},
                        {"ci_lo", est.ci_low},
                        {"ci_hi", est.ci_high},
                        {"lower", bounds.lower_clipped()},
                        {"upper", bounds.upper},
                        {"sharper", bounds.sharper_clipped()}});
    }

    io::RunManifest manifest("coupon", config_path.filename().string(), seed);
    io::ArtifactWriter writer(opts.out, manifest);
    if (opts.format == "csv")
        writer.emit("coupon.csv", csv.str());
    else
        writer.emit("coupon.json", rows.dump(2) + "\n");
    json summary;
    summary["k"] = weights.size();
    summary["trials"] = trials;
    summary["horizons"] = horizons;
    summary["within_bounds"] = ok;
    writer.emit("summary.json", summary.dump(2) + "\n");
    writer.finalize();
    std::cout << "coupon: " << horizons.size() << " horizon(s), within_bounds="
              << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// selftest subcommand
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    double deviation = 0.0;
    std::string note;
};

int run_selftest(const std::string& inject_fault) {
    using namespace looplab;
    std::vector<Check> checks;
    auto add = [&](std::string name, bool pass, double dev, std::string note = "") {
        checks.push_back({std::move(name), pass, dev, std::move(note)});
    };

    for (int h : {1, 2}) {
        const int nu = 2;
        const circuit::TreeTopology topo(nu, h);
        const auto g = graph_metric::build_loop_graph(topo);
        auto metrics = graph_metric::compute_metrics(g);
        if (inject_fault == "laplacian-sign")
            metrics.laplacian = -metrics.laplacian;
        const auto oracle = graph_metric::closed_form_oracle(nu, h);
        const std::string tag = "(nu=2,h=" + std::to_string(h) + ")";

        const double perron_dev = (metrics.phi - oracle.phi).cwiseAbs().maxCoeff();
        add("stationary-vector-closed-form " + tag, perron_dev <= 1e-10, perron_dev);

        Eigen::MatrixXd Ebare = metrics.E;
        for (Eigen::Index i = 0; i < Ebare.rows(); ++i) Ebare(i, i) = 0.0;
        const double asym = (Ebare - Ebare.transpose()).cwiseAbs().maxCoeff();
        add("hitting-mass-symmetry " + tag, asym <= 1e-8, asym);

        double renewal_dev = 0.0;
        const std::size_t B = topo.base_count();
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t j = 0; j < B; ++j)
                if (i != j)
                    renewal_dev = std::max(renewal_dev,
                                           std::abs(metrics.Q(i, j) - oracle.hitting_base_pair(i, j)));
        add("base-pair-hitting-closed-form " + tag, renewal_dev <= 1e-10, renewal_dev);

        const auto diam = graph_metric::diameter(metrics.d);
        const double diam_dev = std::abs(diam.value - oracle.diameter);
        add("diameter-closed-form " + tag, diam_dev <= 1e-10, diam_dev);

        const double ptn = graph_metric::op_norm_inf(Eigen::MatrixXd(metrics.P.transpose()));
        add("transition-transpose-norm " + tag, std::abs(ptn - nu) == 0.0, std::abs(ptn - nu));
        const double lap_norm = graph_metric::op_norm_inf(metrics.laplacian);
        add("laplacian-norm-bound " + tag, lap_norm <= (3.0 + nu) / 2.0, lap_norm);
        // no self-loops, so the diagonal must carry exactly the stationary mass
        const double diag_dev =
            (metrics.laplacian.diagonal() - metrics.phi).cwiseAbs().maxCoeff();
        add("laplacian-diagonal-mass " + tag, diag_dev <= 1e-12, diag_dev);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(metrics.laplacian.rows());
        const double row_sum = (metrics.laplacian * ones).cwiseAbs().maxCoeff();
        add("laplacian-zero-row-sum " + tag, row_sum <= 1e-12, row_sum);
        const double lap_gamma_norm = graph_metric::op_norm_inf(
            graph_metric::principal_submatrix(metrics.laplacian, g.gamma));
        add("laplacian-submatrix-monotone " + tag, lap_gamma_norm <= lap_norm + 1e-15,
            lap_gamma_norm - lap_norm);

        const auto mc = graph_metric::verify_metric(metrics.d);
        add("metric-triangle " + tag, mc.worst_triangle_slack >= -1e-9, mc.worst_triangle_slack);

        const Eigen::MatrixXd d_gamma = graph_metric::principal_submatrix(metrics.d, g.gamma);
        double min_gamma = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < d_gamma.rows(); ++i)
            for (Eigen::Index j = i + 1; j < d_gamma.cols(); ++j)
                min_gamma = std::min(min_gamma, d_gamma(i, j));
        if (d_gamma.rows() > 1)
            add("computation-node-separation " + tag, min_gamma >= std::log(3.0), min_gamma);
    }

    {
        auto g = make_stream(1234, 0);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            Eigen::VectorXd a(4), b(4);
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            for (int i = 0; i < 4; ++i) { a(i) = std::exp(u(g)); b(i) = std::exp(u(g)); }
            aitchison::Composition p(a / a.sum()), q(b / b.sum());
            const double lhs = (aitchison::ilr(p) - aitchison::ilr(q)).norm();
            const double rhs = aitchison::distance(p, q);
            if (rhs > 1e-12) worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        add("ilr-isometry", worst <= 1e-10, worst);
    }

    {
        const circuit::TreeTopology topo(2, 2);
        const auto g = graph_metric::build_loop_graph(topo);
        const auto metrics = graph_metric::compute_metrics(g);
        const Eigen::MatrixXd lap_gamma = graph_metric::principal_submatrix(metrics.laplacian, g.gamma);
        const Eigen::MatrixXd d_gamma = graph_metric::principal_submatrix(metrics.d, g.gamma);
        auto rng = make_stream(77, 0);
        double worst_excess = -std::numeric_limits<double>::infinity();
        const int m = 3;
        for (int t = 0; t < 100; ++t) {
            const int L = 1 + int(t % 2), p = 1 + int((t / 2) % 2);
            std::vector<int> dims(L + 1, m - 1);
            dims[0] = 1;
            std::vector<double> budgets(L, 1.0);
            auto hyp = probe::sample_hypothesis(dims, budgets, p, probe::Activation::ReluLike, rng);
            Eigen::VectorXd x(topo.internal_count());
            std::uniform_int_distribution<int> bit(0, 1);
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = bit(rng);
            const double measured = probe::lipschitz_measure(hyp, lap_gamma, x, d_gamma);
            const double bound = probe::lipschitz_bound(2, m, p, L, budgets);
            worst_excess = std::max(worst_excess, measured - bound);
        }
        add("gcn-smoothness-bound", worst_excess <= 1e-12, worst_excess);

        transport::FiniteMetricSpace gamma_space(d_gamma);
        const auto emb = transport::embed_line_heuristic(transport::snowflake(gamma_space, 0.5));
        double worst_slack = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd w1(3), w2(3);
            for (int i = 0; i < 3; ++i) { w1(i) = uniform01(rng) + 0.05; w2(i) = uniform01(rng) + 0.05; }
            transport::DiscreteMeasure mu(w1 / w1.sum()), nu_m(w2 / w2.sum());
            const auto rep = transport::sandwich_check(gamma_space, 0.5, mu, nu_m, emb);
            worst_slack = std::min({worst_slack, rep.upper_slack, rep.lower_slack});
        }
        add("line-embedding-sandwich", worst_slack >= -1e-8, worst_slack);
    }

    {
        const double exact = experiment::coupon_exact_coverage({1.0 / 3, 1.0 / 3, 1.0 / 3}, 3);
        add("coupon-exact-uniform", std::abs(exact - 2.0 / 9.0) <= 1e-12, exact);
        const auto bounds = experiment::coupon_bounds({1.0 / 3, 1.0 / 3, 1.0 / 3}, 3);
        add("coupon-bounds-order",
            bounds.lower <= exact && exact <= bounds.upper && bounds.sharper_lower >= bounds.lower - 1e-12,
            exact);
        const auto ext = experiment::coupon_extremal_check(3, 0.1, 5, 2000);
        add("coupon-extremal", ext.ok, ext.worst_extremal_margin);
    }

    {
        auto rng = make_stream(55, 0);
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            const int n = 2 + int(t % 6);
            Eigen::VectorXd xs(n), w1(n), w2(n);
            for (int i = 0; i < n; ++i) {
                xs(i) = uniform01(rng) * 10.0 - 5.0;
                w1(i) = uniform01(rng) + 0.01;
                w2(i) = uniform01(rng) + 0.01;
            }
            w1 /= w1.sum();
            w2 /= w2.sum();
            Eigen::MatrixXd dd(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dd(i, j) = std::abs(xs(i) - xs(j));
            bool degenerate = false;
            for (int i = 0; i < n && !degenerate; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (dd(i, j) <= 0.0) degenerate = true;
            if (degenerate) continue;
            transport::FiniteMetricSpace line(dd);
            const double via_flow =
                transport::wasserstein_alpha(transport::DiscreteMeasure(w1),
                                             transport::DiscreteMeasure(w2), line, 1.0);
            std::vector<std::pair<double, double>> a, b;
            for (int i = 0; i < n; ++i) { a.emplace_back(xs(i), w1(i)); b.emplace_back(xs(i), w2(i)); }
            const double via_cdf = transport::wasserstein_1d(a, b);
            worst = std::max(worst, std::abs(via_flow - via_cdf));
        }
        add("transport-two-routes", worst <= 1e-9, worst);
    }

    std::size_t failures = 0;
    std::printf("%-44s %-6s %s\n", "check", "status", "max deviation");
    for (const auto& c : checks) {
        if (!c.pass) ++failures;
        std::printf("%-44s %-6s %s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                    format_double(c.deviation).c_str());
    }
    std::printf("%zu/%zu checks passed\n", checks.size() - failures, checks.size());
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"looplab: metric geometry and probe-generalization lab for looped circuits"};
    app.require_subcommand(1);

    CommonOpts graph_opts, gap_opts, coupon_opts;

    auto* graph_cmd = app.add_subcommand("graph", "Compute the loop-graph Markov geometry");
    int nu = 0, h = 0;
    bool with_oracle = false;
    std::string method = "exact";
    std::size_t trials = 100000;
    graph_cmd->add_option("--nu", nu, "Tree branching factor (>= 2)")->required();
    graph_cmd->add_option("--height", h, "Tree height (>= 1)")->required();
    graph_cmd->add_flag("--oracle", with_oracle, "Also emit closed-form predictions and deviations");
    graph_cmd->add_option("--method", method, "Hitting-probability solver")
        ->check(CLI::IsMember({"exact", "monte-carlo"}));
    graph_cmd->add_option("--trials", trials, "Monte Carlo trials per pair");
    add_common(graph_cmd, graph_opts);

    auto* gap_cmd = app.add_subcommand("gap", "Run the generalization-gap experiment");
    std::filesystem::path gap_config;
    gap_cmd->add_option("config", gap_config, "JSON config file")->required();
    add_common(gap_cmd, gap_opts);

    auto* coupon_cmd = app.add_subcommand("coupon", "Run the covering-time suite");
    std::filesystem::path coupon_config;
    coupon_cmd->add_option("config", coupon_config, "JSON config file")->required();
    add_common(coupon_cmd, coupon_opts);

    auto* selftest_cmd = app.add_subcommand("selftest", "Run all closed-form cross-checks");
    std::string inject_fault;
    selftest_cmd->add_option("--inject-fault", inject_fault)->group("");  // test hook, hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (graph_cmd->parsed()) {
            if (nu < 2 || h < 1) {
                std::cerr << "error: require nu >= 2 and height >= 1\n";
                return 2;
            }
            return run_graph(nu, h, with_oracle, method, trials, graph_opts);
        }
        if (gap_cmd->parsed()) return run_gap(gap_config, gap_opts);
        if (coupon_cmd->parsed()) return run_coupon(coupon_config, coupon_opts);
        if (selftest_cmd->parsed()) return run_selftest(inject_fault);
    } catch (const looplab::io::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
