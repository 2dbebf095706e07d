#pragma once

#include "looplab/aitchison.hpp"
#include "looplab/circuit.hpp"
#include "looplab/graph_metric.hpp"
#include "looplab/parallel.hpp"
#include "looplab/probe.hpp"
#include "looplab/rng.hpp"
#include "looplab/transport.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab::experiment {

// ---------------------------------------------------------------------------
// losses and risks
// ---------------------------------------------------------------------------

enum class LossTag { Aitchison };

inline LossTag parse_loss(const std::string& s) {
    if (s == "aitchison") return LossTag::Aitchison;
    throw std::invalid_argument("parse_loss: unknown loss tag '" + s + "'");
}

inline double loss(const aitchison::Composition& y, const aitchison::Composition& z, LossTag tag) {
    switch (tag) {
        case LossTag::Aitchison: return aitchison::distance(y, z);
    }
    throw std::invalid_argument("loss: unknown tag");
}

/// Joint-Lipschitz constant of the loss in each argument pair; 2 for the
/// simplex-metric loss by the triangle inequality.
inline double loss_smoothness(LossTag tag) {
    switch (tag) {
        case LossTag::Aitchison: return 2.0;
    }
    throw std::invalid_argument("loss_smoothness: unknown tag");
}

inline double snowflaked_loss(const aitchison::Composition& y, const aitchison::Composition& z,
                              LossTag tag, double alpha) {
    return std::pow(loss(y, z, tag), alpha);
}

/// Exact finite sum over the sampling support; no estimation involved.
inline double population_risk(const std::vector<double>& per_node_loss_alpha,
                              const Eigen::VectorXd& weights) {
    if (Eigen::Index(per_node_loss_alpha.size()) != weights.size())
        throw std::invalid_argument("population_risk: size mismatch");
    double acc = 0.0;
    for (Eigen::Index v = 0; v < weights.size(); ++v) acc += weights(v) * per_node_loss_alpha[v];
    return acc;
}

inline double empirical_risk(const std::vector<double>& per_node_loss_alpha,
                             const std::vector<std::size_t>& sampled_nodes) {
    if (sampled_nodes.empty()) throw std::invalid_argument("empirical_risk: empty sample");
    double acc = 0.0;
    for (auto v : sampled_nodes) acc += per_node_loss_alpha.at(v);
    return acc / double(sampled_nodes.size());
}

// ---------------------------------------------------------------------------
// theorem rate factor
// ---------------------------------------------------------------------------

struct RateParams {
    double c_j = 2.0;
    int m = 3;
    int nu = 2;
    int h = 2;
    int p = 1;
    int L = 1;
    std::vector<double> budgets{1.0};
};

/// The explicit right-hand side of the generalization bound, sans its
/// unspecified absolute constant:
/// (C_J max{sqrt(m) ((3+nu)/2)^{p(L-1)} prod(beta), nu^h, K}^{5/2})^alpha
///   * (1 + sqrt(log(2/delta))) / sqrt(N).
inline double theorem_rate_factor(const RateParams& params, double measured_k, double alpha,
                                  std::size_t n_samples, double delta) {
    double prod = 1.0;
    for (double b : params.budgets) prod *= b;
    const double gcn_term = std::sqrt(double(params.m)) *
                            std::pow((3.0 + params.nu) / 2.0, double(params.p) * (params.L - 1)) * prod;
    const double bracket = std::max({gcn_term, std::pow(double(params.nu), double(params.h)), measured_k});
    const double majorant = std::pow(params.c_j * std::pow(bracket, 2.5), alpha);
    return majorant * (1.0 + std::sqrt(std::log(2.0 / delta))) / std::sqrt(double(n_samples));
}

// ---------------------------------------------------------------------------
// generalization-gap experiment
// ---------------------------------------------------------------------------

struct GapConfig {
    int nu = 2;
    int h = 3;
    std::string gate_preset = "and-or-proj";
    double eta = 0.8;
    double alpha = 0.5;
    std::string loss_tag = "aitchison";
    std::vector<double> sampler_weights;  // over computation nodes; empty = uniform
    std::vector<std::size_t> n_grid{16, 64, 256, 1024, 4096};
    double delta = 0.1;
    std::size_t ensemble = 64;
    int L = 2;
    int p = 1;
    std::vector<double> budgets{1.0, 1.0};
    std::vector<int> hidden_dims;  // interior layer widths; empty = all (m-1)
    std::string activation = "relu";
    std::uint64_t seed = 42;
    std::size_t replications = 200;

    void validate() const {
        if (nu < 2 || h < 1) throw std::invalid_argument("GapConfig: invalid tree parameters");
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("GapConfig: eta must be in (0,1)");
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("GapConfig: alpha must be in (0,1)");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("GapConfig: delta must be in (0,1)");
        if (n_grid.empty() || replications == 0 || ensemble == 0)
            throw std::invalid_argument("GapConfig: empty grid, replications, or ensemble");
        if (static_cast<int>(budgets.size()) != L)
            throw std::invalid_argument("GapConfig: need one budget per layer");
        for (auto n : n_grid)
            if (n == 0) throw std::invalid_argument("GapConfig: N must be positive");
    }
};

struct GapCell {
    std::size_t n = 0;
    std::size_t replication = 0;
    double gap = 0.0;
    double rate_factor = 0.0;
    double ratio = 0.0;
};

struct GapResult {
    std::vector<GapCell> cells;            // replication-major, N-minor
    std::vector<std::size_t> n_grid;
    std::vector<double> gap_quantile;      // (1-delta)-quantile per N
    std::vector<double> ratio_quantile;
    double slope = 0.0;                    // log-log fit of gap quantile vs N
    double measured_k = 0.0;
    double min_weight = 0.0;
    bool sampler_warning = false;          // min weight < 1/(10 #Gamma)
};

/// Empirical (1-q)-upper quantile: smallest order statistic with rank >= ceil(q n).
inline double empirical_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(std::ceil(q * double(values.size())));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

inline GapResult run_gap_experiment(const GapConfig& config, unsigned jobs = 1) {
    config.validate();
    const circuit::TreeTopology topo(config.nu, config.h);
    const auto gates = circuit::default_gate_set(config.nu, config.gate_preset);
    const int m = static_cast<int>(gates.size());
    const std::size_t s = topo.internal_count();

    Eigen::VectorXd weights;
    if (config.sampler_weights.empty()) {
        weights = Eigen::VectorXd::Constant(s, 1.0 / double(s));
    } else {
        if (config.sampler_weights.size() != s)
            throw std::invalid_argument("run_gap_experiment: sampler weights must cover all computation nodes");
        weights = Eigen::Map<const Eigen::VectorXd>(config.sampler_weights.data(), s);
        if (std::abs(weights.sum() - 1.0) > 1e-9 || weights.minCoeff() <= 0.0)
            throw std::invalid_argument("run_gap_experiment: sampler weights must be positive and sum to 1");
    }

    const auto g = graph_metric::build_loop_graph(topo);
    const auto metrics = graph_metric::compute_metrics(g);
    const Eigen::MatrixXd lap_gamma = graph_metric::principal_submatrix(metrics.laplacian, g.gamma);

    const probe::ProbeParams probe_params{config.eta, m};
    const double measured_k = probe::probe_complexity(probe_params);
    const LossTag tag = parse_loss(config.loss_tag);
    const probe::Activation act = probe::parse_activation(config.activation);
    RateParams rate;
    rate.c_j = loss_smoothness(tag);
    rate.m = m;
    rate.nu = config.nu;
    rate.h = config.h;
    rate.p = config.p;
    rate.L = config.L;
    rate.budgets = config.budgets;

    std::vector<int> dims(config.L + 1, m - 1);
    dims[0] = 1;
    if (!config.hidden_dims.empty()) {
        if (static_cast<int>(config.hidden_dims.size()) != config.L - 1)
            throw std::invalid_argument("run_gap_experiment: need L-1 hidden dims");
        for (int l = 1; l < config.L; ++l) dims[l] = config.hidden_dims[l - 1];
    }

    GapResult result;
    result.n_grid = config.n_grid;
    result.measured_k = measured_k;
    result.min_weight = weights.minCoeff();
    result.sampler_warning = result.min_weight < 1.0 / (10.0 * double(s));
    result.cells.resize(config.replications * config.n_grid.size());

    const std::size_t n_cells = result.cells.size();
    parallel_for(n_cells, jobs, [&](std::size_t cell_idx) {
        const std::size_t rep = cell_idx / config.n_grid.size();
        const std::size_t ni = cell_idx % config.n_grid.size();
        const std::size_t N = config.n_grid[ni];
        auto rng = make_stream(config.seed, cell_idx);

        circuit::GateConfiguration gate_config;
        gate_config.gate_at.resize(s);
        std::uniform_int_distribution<int> pick_gate(0, m - 1);
        for (auto& gidx : gate_config.gate_at) gidx = pick_gate(rng);

        std::vector<std::uint8_t> prompt(topo.base_count());
        std::uniform_int_distribution<int> bit(0, 1);
        for (auto& b : prompt) b = static_cast<std::uint8_t>(bit(rng));
        const auto eval = circuit::evaluate_tree(topo, gate_config, gates, prompt);
        Eigen::VectorXd x(s);
        for (std::size_t v = 0; v < s; ++v) x(v) = eval.internal_values[v];

        std::vector<aitchison::Composition> targets;
        targets.reserve(s);
        for (std::size_t v = 0; v < s; ++v)
            targets.push_back(probe::probe_output_for_gate(probe_params, gate_config.gate_at[v]));

        // per-node snowflaked losses for each ensemble member
        std::vector<std::vector<double>> per_node(config.ensemble, std::vector<double>(s));
        for (std::size_t e = 0; e < config.ensemble; ++e) {
            const auto hyp = probe::sample_hypothesis(dims, config.budgets, config.p, act, rng);
            const auto outputs = probe::hypothesis_apply(hyp, lap_gamma, x, m);
            for (std::size_t v = 0; v < s; ++v)
                per_node[e][v] = snowflaked_loss(outputs[v], targets[v], tag, config.alpha);
        }

        // N i.i.d. node draws with replacement
        std::vector<double> cum(s);
        double acc = 0.0;
        for (std::size_t v = 0; v < s; ++v) { acc += weights(v); cum[v] = acc; }
        std::vector<std::size_t> counts(s, 0);
        for (std::size_t i = 0; i < N; ++i) {
            const double r = uniform01(rng);
            std::size_t v = 0;
            while (v + 1 < s && cum[v] < r) ++v;
            ++counts[v];
        }

        double gap = 0.0;
        for (std::size_t e = 0; e < config.ensemble; ++e) {
            const double pop = population_risk(per_node[e], weights);
            double emp = 0.0;
            for (std::size_t v = 0; v < s; ++v) emp += double(counts[v]) * per_node[e][v];
            emp /= double(N);
            gap = std::max(gap, std::abs(pop - emp));
        }

        GapCell cell;
        cell.n = N;
        cell.replication = rep;
        cell.gap = gap;
        cell.rate_factor = theorem_rate_factor(rate, measured_k, config.alpha, N, config.delta);
        cell.ratio = cell.gap / cell.rate_factor;
        result.cells[cell_idx] = cell;
    });

    const double q = 1.0 - config.delta;
    for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
        std::vector<double> gaps, ratios;
        gaps.reserve(config.replications);
        for (std::size_t rep = 0; rep < config.replications; ++rep) {
            const auto& c = result.cells[rep * config.n_grid.size() + ni];
            gaps.push_back(c.gap);
            ratios.push_back(c.ratio);
        }
        result.gap_quantile.push_back(empirical_quantile(gaps, q));
        result.ratio_quantile.push_back(empirical_quantile(ratios, q));
    }

    // least-squares slope of log(quantile gap) against log N
    const std::size_t n = config.n_grid.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(double(config.n_grid[i]));
        const double ly = std::log(result.gap_quantile[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    result.slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
    return result;
}

// ---------------------------------------------------------------------------
// gap vs transport inequality
// ---------------------------------------------------------------------------

struct RiskTransportReport {
    double gap = 0.0;
    double w_alpha = 0.0;
    double bound = 0.0;  // (C_J (C_H + C_Q))^alpha * W_alpha
    double c_hypothesis = 0.0;
    double c_probe = 0.0;
    bool ok = false;
};

/// Checks |population - empirical| <= (C_J (C_H + C_Q))^alpha W_alpha(mu, mu_N)
/// with the measured hypothesis constant and the probe constant
/// K / min-distance, transport computed exactly on the computation-node metric.
inline RiskTransportReport risk_wasserstein_check(
    const std::vector<double>& per_node_loss_alpha, const Eigen::VectorXd& weights,
    const std::vector<std::size_t>& sampled_nodes, const Eigen::MatrixXd& d_gamma,
    double measured_c_hypothesis, double probe_k, double c_j, double alpha) {
    const std::size_t s = per_node_loss_alpha.size();
    RiskTransportReport rep;
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j) min_d = std::min(min_d, d_gamma(i, j));
    rep.c_hypothesis = measured_c_hypothesis;
    rep.c_probe = s > 1 ? probe_k / min_d : 0.0;
    rep.gap = std::abs(population_risk(per_node_loss_alpha, weights) -
                       empirical_risk(per_node_loss_alpha, sampled_nodes));
    transport::FiniteMetricSpace space(d_gamma);
    transport::DiscreteMeasure mu(weights);
    transport::DiscreteMeasure mu_n = transport::DiscreteMeasure::from_counts(sampled_nodes, s);
    rep.w_alpha = transport::wasserstein_alpha(mu, mu_n, space, alpha);
    rep.bound = std::pow(c_j * (rep.c_hypothesis + rep.c_probe), alpha) * rep.w_alpha;
    rep.ok = rep.gap <= rep.bound + 1e-10;
    return rep;
}

// ---------------------------------------------------------------------------
// coupon-collector suite
// ---------------------------------------------------------------------------

struct CouponConfig {
    std::vector<double> weights;  // positive, sum 1
    std::size_t horizon = 0;      // draws per trial, >= k
    std::size_t trials = 100'000;
    std::uint64_t seed = 7;

    void validate() const {
        if (weights.size() < 2) throw std::invalid_argument("CouponConfig: need k >= 2");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w > 0.0)) throw std::invalid_argument("CouponConfig: weights must be positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("CouponConfig: weights must sum to 1");
        if (horizon < weights.size()) throw std::invalid_argument("CouponConfig: horizon must be >= k");
        if (trials == 0) throw std::invalid_argument("CouponConfig: trials must be positive");
    }
};

struct CouponEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;   // 99% binomial CI
    double ci_high = 0.0;
};

/// Monte-Carlo frequency of covering all points within the horizon.
inline CouponEstimate coupon_simulate(const CouponConfig& config) {
    config.validate();
    const std::size_t k = config.weights.size();
    std::vector<double> cum(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) { acc += config.weights[i]; cum[i] = acc; }
    std::size_t covered_count = 0;
    auto g = make_stream(config.seed, 0);
    std::vector<char> seen(k);
    for (std::size_t t = 0; t < config.trials; ++t) {
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t distinct = 0;
        for (std::size_t n = 0; n < config.horizon && distinct < k; ++n) {
            const double r = uniform01(g);
            std::size_t i = 0;
            while (i + 1 < k && cum[i] < r) ++i;
            if (!seen[i]) { seen[i] = 1; ++distinct; }
        }
        if (distinct == k) ++covered_count;
    }
    CouponEstimate est;
    est.estimate = double(covered_count) / double(config.trials);
    const double se = std::sqrt(std::max(est.estimate * (1.0 - est.estimate), 1e-12) / double(config.trials));
    const double z99 = 2.5758293035489004;
    est.ci_low = std::max(0.0, est.estimate - z99 * se);
    est.ci_high = std::min(1.0, est.estimate + z99 * se);
    return est;
}

struct CouponBounds {
    double lower = 0.0;          // 1 - k (1 - w_min)^n, possibly negative
    double upper = 0.0;          // 1 - (1 - w_min)^n
    double sharper_lower = 0.0;  // 1 - (k-1)^n w_min^n - (k-1)(1 - w_min)^n

    double lower_clipped() const { return std::max(0.0, lower); }
    double sharper_clipped() const { return std::max(0.0, sharper_lower); }
};

inline CouponBounds coupon_bounds(const std::vector<double>& weights, std::size_t horizon) {
    const double k = double(weights.size());
    const double wmin = *std::min_element(weights.begin(), weights.end());
    const double n = double(horizon);
    CouponBounds b;
    b.lower = 1.0 - k * std::pow(1.0 - wmin, n);
    b.upper = 1.0 - std::pow(1.0 - wmin, n);
    b.sharper_lower = 1.0 - std::pow((k - 1.0) * wmin, n) - (k - 1.0) * std::pow(1.0 - wmin, n);
    return b;
}

/// Exact coverage probability by inclusion-exclusion over missed subsets.
/// Cost 2^k; intended for small k.
inline double coupon_exact_coverage(const std::vector<double>& weights, std::size_t horizon) {
    const std::size_t k = weights.size();
    if (k > 24) throw std::invalid_argument("coupon_exact_coverage: k too large for 2^k enumeration");
    double acc = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
        double missed = 0.0;
        int bits = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t(1) << i)) { missed += weights[i]; ++bits; }
        acc += ((bits % 2 == 0) ? 1.0 : -1.0) * std::pow(1.0 - missed, double(horizon));
    }
    return acc;
}

struct ExtremalReport {
    std::size_t draws = 0;
    std::size_t extremal_violations = 0;  // f(p) < f(p*) found
    std::size_t uniform_violations = 0;   // f(p) > f(uniform) found
    double worst_extremal_margin = std::numeric_limits<double>::infinity();  // min f(p) - f(p*)
    bool ok = false;
};

/// With f(p) = 1 - sum_i (1 - p_i)^n, samples the restricted simplex
/// {p_i >= omega} and verifies that the corner p* = (1-(k-1)w, w, ..., w)
/// minimizes f there (which is what the sharper lower bound needs: f is
/// concave and symmetric, so corners are minimizers and the uniform point is
/// the maximizer).
inline ExtremalReport coupon_extremal_check(std::size_t k, double omega, std::size_t horizon,
                                            std::size_t draws, std::uint64_t seed = 11) {
    if (k < 2) throw std::invalid_argument("coupon_extremal_check: need k >= 2");
    if (omega < 0.0 || omega > 1.0 / double(k))
        throw std::invalid_argument("coupon_extremal_check: omega must be in [0, 1/k]");
    auto f = [&](const std::vector<double>& p) {
        double acc = 1.0;
        for (double pi : p) acc -= std::pow(1.0 - pi, double(horizon));
        return acc;
    };
    std::vector<double> star(k, omega);
    star[0] = 1.0 - (double(k) - 1.0) * omega;
    const double f_star = f(star);
    std::vector<double> uni(k, 1.0 / double(k));
    const double f_uni = f(uni);

    ExtremalReport rep;
    rep.draws = draws;
    auto g = make_stream(seed, 0);
    std::exponential_distribution<double> expo(1.0);
    const double free_mass = 1.0 - double(k) * omega;
    std::vector<double> p(k);
    for (std::size_t t = 0; t < draws; ++t) {
        // Dirichlet(1,..,1) on the free mass, shifted by the floor omega
        double total = 0.0;
        for (auto& pi : p) { pi = expo(g); total += pi; }
        for (auto& pi : p) pi = omega + free_mass * (pi / total);
        const double fp = f(p);
        rep.worst_extremal_margin = std::min(rep.worst_extremal_margin, fp - f_star);
        if (fp < f_star - 1e-12) ++rep.extremal_violations;
        if (fp > f_uni + 1e-12) ++rep.uniform_violations;
    }
    rep.ok = rep.extremal_violations == 0 && rep.uniform_violations == 0;
    return rep;
}

} // namespace looplab::experiment
