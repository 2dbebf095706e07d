#pragma once

#include "looplab/circuit.hpp"
#include "looplab/parallel.hpp"
#include "looplab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace looplab::graph_metric {

/// Simple digraph with designated index roles for the computation loop:
/// tree nodes first (base level upward, root last among them), then the tape
/// chain. gamma() lists the computation nodes.
class Digraph {
  public:
    Digraph(std::size_t k, std::vector<std::pair<std::size_t, std::size_t>> edges)
        : k_(k), edges_(std::move(edges)) {
        for (auto [a, b] : edges_) {
            if (a >= k_ || b >= k_) throw std::invalid_argument("Digraph: edge endpoint out of range");
            if (a == b) throw std::invalid_argument("Digraph: self-loops not allowed");
        }
        auto sorted = edges_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("Digraph: duplicate edge");
    }

    std::size_t size() const { return k_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

    Eigen::MatrixXd adjacency() const {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k_, k_);
        for (auto [a, b] : edges_) A(a, b) = 1.0;
        return A;
    }

    bool strongly_connected() const {
        return reaches_all(false) && reaches_all(true);
    }

    // role bookkeeping (set by build_loop_graph)
    std::vector<std::size_t> base_nodes;   // v_1..v_{nu^h}
    std::vector<std::size_t> gamma;        // computation nodes, topology order
    std::vector<std::size_t> tape_nodes;   // T_0..T_{nu^h-1}
    std::size_t root = 0;
    std::vector<std::string> labels;

  private:
    bool reaches_all(bool reverse) const {
        std::vector<std::vector<std::size_t>> adj(k_);
        for (auto [a, b] : edges_) reverse ? adj[b].push_back(a) : adj[a].push_back(b);
        std::vector<char> seen(k_, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u])
                if (!seen[v]) { seen[v] = 1; stack.push_back(v); }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    }

    std::size_t k_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// The strongly connected quotient of the looped execution: tree edges toward
/// the root, the root-to-tape feedback edge, the tape chain, and the
/// tape-to-base read edges.
inline Digraph build_loop_graph(const circuit::TreeTopology& topo) {
    const std::size_t B = topo.base_count();
    const std::size_t T = topo.total_nodes();
    const std::size_t k = T + B;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t node = 0; node + 1 < T; ++node) edges.emplace_back(node, topo.parent(node));
    edges.emplace_back(topo.root(), T);                                   // r -> T_0
    for (std::size_t i = 0; i + 1 < B; ++i) edges.emplace_back(T + i, T + i + 1);  // T_i -> T_{i+1}
    for (std::size_t i = 0; i < B; ++i) edges.emplace_back(T + i, i);     // T_i -> v_{i+1}
    Digraph g(k, std::move(edges));
    g.root = topo.root();
    for (std::size_t i = 0; i < B; ++i) g.base_nodes.push_back(i);
    for (std::size_t i = B; i < T; ++i) g.gamma.push_back(i);
    for (std::size_t i = 0; i < B; ++i) g.tape_nodes.push_back(T + i);
    g.labels.resize(k);
    for (std::size_t i = 0; i < B; ++i) g.labels[i] = "v" + std::to_string(i + 1);
    for (std::size_t i = B; i + 1 < T; ++i) g.labels[i] = "u" + std::to_string(i - B + 1);
    g.labels[topo.root()] = "r";
    for (std::size_t i = 0; i < B; ++i) g.labels[T + i] = "T" + std::to_string(i);
    return g;
}

/// Row-stochastic transition matrix P = D^{-1} A.
inline Eigen::MatrixXd transition_matrix(const Digraph& g) {
    Eigen::MatrixXd A = g.adjacency();
    Eigen::MatrixXd P(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double deg = A.row(i).sum();
        if (deg <= 0.0) throw std::invalid_argument("transition_matrix: vertex with zero out-degree");
        P.row(i) = A.row(i) / deg;
    }
    return P;
}

/// Maximum absolute row sum (the induced sup-norm of the linear map).
inline double op_norm_inf(const Eigen::MatrixXd& M) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) best = std::max(best, M.row(i).cwiseAbs().sum());
    return best;
}

/// Stationary distribution of an irreducible P by power iteration on the
/// half-lazy transpose (handles periodic chains); cross-checked against a
/// direct null-space solve for k <= 200.
inline Eigen::VectorXd perron_vector(const Eigen::MatrixXd& P, double tolerance = 1e-13,
                                     std::size_t max_iters = 1'000'000) {
    const Eigen::Index k = P.rows();
    Eigen::MatrixXd Mt = 0.5 * (P.transpose() + Eigen::MatrixXd::Identity(k, k));
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(k, 1.0 / double(k));
    double residual = 1.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        Eigen::VectorXd next = Mt * phi;
        next /= next.sum();
        residual = (P.transpose() * next - next).cwiseAbs().maxCoeff();
        phi = next;
        if (residual <= tolerance) break;
    }
    if (residual > tolerance)
        throw std::runtime_error("perron_vector: power iteration did not converge (reducible chain?)");

    if (k <= 200) {
        // null-space route: replace the last stationarity equation by the normalization
        Eigen::MatrixXd M = P.transpose() - Eigen::MatrixXd::Identity(k, k);
        M.row(k - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
        b(k - 1) = 1.0;
        Eigen::VectorXd direct = M.partialPivLu().solve(b);
        if ((direct - phi).cwiseAbs().maxCoeff() > 1e-9)
            throw std::runtime_error("perron_vector: power iteration and direct solve disagree");
        phi = direct;  // the direct solve is the sharper of the two
    }
    for (Eigen::Index i = 0; i < k; ++i)
        if (!(phi(i) > 0.0)) throw std::runtime_error("perron_vector: non-positive entry");
    return phi;
}

struct MonteCarloParams {
    std::size_t trials = 100'000;
    std::uint64_t seed = 0;
    std::size_t max_steps_per_trial = 10'000'000;
};

/// Exact hitting probabilities: Q(i,j) = P[hit j before returning to i | X0=i],
/// via one linear solve per ordered pair. Diagonal stored as 0. Pair solves
/// are independent, so rows are dealt out across jobs.
inline Eigen::MatrixXd hitting_probabilities_exact(const Eigen::MatrixXd& P, unsigned jobs = 1) {
    const Eigen::Index k = P.rows();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(k, k);
    parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t row) {
        const Eigen::Index i = static_cast<Eigen::Index>(row);
        std::vector<Eigen::Index> keep;
        keep.reserve(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j) continue;
            keep.clear();
            for (Eigen::Index x = 0; x < k; ++x)
                if (x != i && x != j) keep.push_back(x);
            const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
            // u(x) = sum_y P(x,y) u(y) with u(j)=1, u(i)=0  =>  (I - P_restricted) u = P(.,j)
            Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
            Eigen::VectorXd b(n);
            for (Eigen::Index a = 0; a < n; ++a) {
                for (Eigen::Index c = 0; c < n; ++c) M(a, c) -= P(keep[a], keep[c]);
                b(a) = P(keep[a], j);
            }
            Eigen::VectorXd u = M.partialPivLu().solve(b);
            double q = P(i, j);
            for (Eigen::Index a = 0; a < n; ++a) q += P(i, keep[a]) * u(a);
            Q(i, j) = q;
        }
    });
    return Q;
}

/// Monte Carlo hitting probabilities. Each ordered pair gets its own stream
/// derived from the seed, so the estimate is independent of scheduling.
inline Eigen::MatrixXd hitting_probabilities_monte_carlo(const Eigen::MatrixXd& P,
                                                         const MonteCarloParams& params,
                                                         unsigned jobs = 1) {
    const Eigen::Index k = P.rows();
    Eigen::MatrixXd cum(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) { acc += P(i, j); cum(i, j) = acc; }
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(k, k);
    parallel_for(static_cast<std::size_t>(k) * k, jobs, [&](std::size_t pair) {
        const Eigen::Index i = static_cast<Eigen::Index>(pair / k);
        const Eigen::Index j = static_cast<Eigen::Index>(pair % k);
        if (i == j) return;
        auto g = make_stream(params.seed, pair);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < params.trials; ++t) {
            Eigen::Index x = i;
            for (std::size_t s = 0; s < params.max_steps_per_trial; ++s) {
                const double r = uniform01(g);
                Eigen::Index y = 0;
                while (y + 1 < k && cum(x, y) < r) ++y;
                x = y;
                if (x == j) { ++hits; break; }
                if (x == i) break;
            }
        }
        Q(i, j) = double(hits) / double(params.trials);
    });
    return Q;
}

enum class HittingMethod { Exact, MonteCarlo };

inline Eigen::MatrixXd hitting_probabilities(const Eigen::MatrixXd& P, HittingMethod method,
                                             const MonteCarloParams& params = {}, unsigned jobs = 1) {
    return method == HittingMethod::Exact ? hitting_probabilities_exact(P, jobs)
                                          : hitting_probabilities_monte_carlo(P, params, jobs);
}

/// E(i,j) = phi(i) Q(i,j) off-diagonal, E(i,i) = 1. Throws if the reversibility
/// identity phi(i)Q(i,j) = phi(j)Q(j,i) is violated beyond the tolerance.
inline Eigen::MatrixXd normalized_hitting(const Eigen::VectorXd& phi, const Eigen::MatrixXd& Q,
                                          double symmetry_tol = 1e-8) {
    const Eigen::Index k = Q.rows();
    if (phi.size() != k) throw std::invalid_argument("normalized_hitting: shape mismatch");
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            if (i != j) E(i, j) = phi(i) * Q(i, j);
    const double asym = (E - E.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tol)
        throw std::runtime_error("normalized_hitting: symmetry violated by " + std::to_string(asym));
    return E;
}

/// d(i,j) = -log E(i,j); requires off-diagonal entries in (0, 1].
inline Eigen::MatrixXd hitting_metric(const Eigen::MatrixXd& E) {
    const Eigen::Index k = E.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j) continue;
            if (!(E(i, j) > 0.0)) throw std::invalid_argument("hitting_metric: non-positive entry");
            d(i, j) = -std::log(E(i, j));
        }
    return d;
}

struct MetricCheck {
    bool symmetric = true;
    bool positive_off_diagonal = true;
    double worst_triangle_slack = 0.0;  // min over triples of d(i,k)+d(k,j)-d(i,j)
    bool exhaustive = true;
    std::size_t triples_checked = 0;
};

/// Triangle inequality check: exhaustive for k <= 500, sampled beyond.
inline MetricCheck verify_metric(const Eigen::MatrixXd& d, std::uint64_t sample_seed = 17,
                                 std::size_t sample_triples = 1'000'000) {
    const Eigen::Index k = d.rows();
    MetricCheck out;
    out.worst_triangle_slack = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            if (std::abs(d(i, j) - d(j, i)) > 1e-12) out.symmetric = false;
            if (i != j && !(d(i, j) > 0.0)) out.positive_off_diagonal = false;
        }
    auto slack = [&](Eigen::Index i, Eigen::Index j, Eigen::Index l) {
        return d(i, l) + d(l, j) - d(i, j);
    };
    if (k <= 500) {
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index l = 0; l < k; ++l) {
                    if (i == j || j == l || i == l) continue;
                    out.worst_triangle_slack = std::min(out.worst_triangle_slack, slack(i, j, l));
                    ++out.triples_checked;
                }
    } else {
        out.exhaustive = false;
        auto g = make_stream(sample_seed, 0);
        std::uniform_int_distribution<Eigen::Index> pick(0, k - 1);
        for (std::size_t t = 0; t < sample_triples; ++t) {
            Eigen::Index i = pick(g), j = pick(g), l = pick(g);
            if (i == j || j == l || i == l) continue;
            out.worst_triangle_slack = std::min(out.worst_triangle_slack, slack(i, j, l));
            ++out.triples_checked;
        }
    }
    return out;
}

/// Combinatorial Laplacian Phi - (Phi P + P^T Phi)/2.
inline Eigen::MatrixXd laplacian(const Eigen::MatrixXd& P, const Eigen::VectorXd& phi) {
    Eigen::MatrixXd Phi = phi.asDiagonal();
    return Phi - 0.5 * (Phi * P + P.transpose() * Phi);
}

/// Principal submatrix on the given index set (used for the computation-node block).
inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& M,
                                           const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd S(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            S(a, b) = M(idx[a], idx[b]);
    return S;
}

struct Diameter {
    double value = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
};

inline Diameter diameter(const Eigen::MatrixXd& d) {
    Diameter out;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            if (i != j && d(i, j) > out.value) {
                out.value = d(i, j);
                out.i = static_cast<std::size_t>(i);
                out.j = static_cast<std::size_t>(j);
            }
    return out;
}

namespace detail {

// exact minimum set cover by DFS with a greedy upper bound; universe/sets as bitmasks
inline int min_cover(const std::vector<std::uint64_t>& sets, std::uint64_t universe) {
    if (universe == 0) return 0;
    // greedy upper bound
    int greedy = 0;
    std::uint64_t left = universe;
    while (left) {
        std::uint64_t best = 0;
        for (auto s : sets) {
            std::uint64_t gain = s & left;
            if (__builtin_popcountll(gain) > __builtin_popcountll(best)) best = gain;
        }
        if (best == 0) return -1;  // uncoverable (cannot happen: singletons exist)
        left &= ~best;
        ++greedy;
    }
    int best_n = greedy;
    // DFS branching on sets that cover the lowest uncovered element
    auto dfs = [&](auto&& self, std::uint64_t rem, int used) -> void {
        if (rem == 0) { best_n = std::min(best_n, used); return; }
        if (used + 1 >= best_n) return;
        const int low = __builtin_ctzll(rem);
        for (auto s : sets)
            if (s & (1ULL << low)) self(self, rem & ~s, used + 1);
    };
    dfs(dfs, universe, 0);
    return best_n;
}

} // namespace detail

/// Smallest M such that every closed ball of radius r is covered by M closed
/// balls of radius r/2 (centers in the space), by exhaustive search over the
/// finitely many radii where the cover structure can change. k <= 64 only.
inline int doubling_constant(const Eigen::MatrixXd& d) {
    const Eigen::Index k = d.rows();
    if (k > 64) throw std::invalid_argument("doubling_constant: brute force limited to k <= 64");
    std::vector<double> radii;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            if (i != j) { radii.push_back(d(i, j)); radii.push_back(2.0 * d(i, j)); }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    int M = 1;
    for (double r : radii) {
        for (Eigen::Index x = 0; x < k; ++x) {
            std::uint64_t ball = 0;
            for (Eigen::Index y = 0; y < k; ++y)
                if (d(x, y) <= r + 1e-15) ball |= (1ULL << y);
            std::vector<std::uint64_t> halves;
            halves.reserve(k);
            for (Eigen::Index c = 0; c < k; ++c) {
                std::uint64_t s = 0;
                for (Eigen::Index y = 0; y < k; ++y)
                    if (d(c, y) <= r / 2.0 + 1e-15) s |= (1ULL << y);
                halves.push_back(s & ball);
            }
            M = std::max(M, detail::min_cover(halves, ball));
        }
    }
    return M;
}

// ---------------------------------------------------------------------------
// closed-form reference values for the loop graph
// ---------------------------------------------------------------------------

/// Analytic reference quantities for the loop graph, derived from stationarity
/// and the excursion renewal structure of the chain. `phi` is the full
/// stationary vector (tape and base cells in closed form, interior computation
/// nodes by summing children). `excursion_mass[i]` is the probability that a
/// single pass from the root reaches base node v_{i+1} before re-entering the
/// tree; hitting probabilities between base nodes are the renewal ratios
/// mass_j / (mass_i + mass_j).
struct ClosedFormOracle {
    double phi_root = 0.0;
    Eigen::VectorXd phi;             // full stationary vector, loop-graph indexing
    Eigen::VectorXd excursion_mass;  // per base node
    double min_gamma_distance_lb = 0.0;  // log 3
    double diameter = 0.0;               // -log(phi_root / 2^{nu^h})
    std::size_t diameter_i = 0, diameter_j = 0;
    double op_norm_p_transpose = 0.0;    // nu
    double laplacian_norm_ub = 0.0;      // (3 + nu)/2

    double hitting_base_pair(std::size_t i, std::size_t j) const {  // 0-based base indices
        return excursion_mass(j) / (excursion_mass(i) + excursion_mass(j));
    }
    double normalized_base_pair(std::size_t i, std::size_t j) const {
        return phi_root * excursion_mass(i) * excursion_mass(j) /
               (excursion_mass(i) + excursion_mass(j));
    }
};

inline ClosedFormOracle closed_form_oracle(int nu, int h) {
    const circuit::TreeTopology topo(nu, h);
    const std::size_t B = topo.base_count();
    const std::size_t T = topo.total_nodes();
    ClosedFormOracle out;
    out.phi_root = 1.0 / (3.0 - std::pow(2.0, 1.0 - double(B)) + double(h));
    out.excursion_mass.resize(B);
    for (std::size_t i = 0; i + 1 < B; ++i) out.excursion_mass(i) = std::pow(2.0, -double(i + 1));
    out.excursion_mass(B - 1) = std::pow(2.0, -double(B - 1));
    out.phi.resize(T + B);
    out.phi(T) = out.phi_root;  // T_0
    for (std::size_t i = 1; i < B; ++i) out.phi(T + i) = out.phi_root * std::pow(2.0, -double(i));
    for (std::size_t i = 0; i < B; ++i) out.phi(i) = out.phi_root * out.excursion_mass(i);
    for (std::size_t node = B; node < T; ++node) {
        double acc = 0.0;
        for (int c = 0; c < nu; ++c) acc += out.phi(topo.child(node, c));
        out.phi(node) = acc;  // every child forwards its full mass to the parent
    }
    out.min_gamma_distance_lb = std::log(3.0);
    // the smallest normalized entry pairs the two least-visited base cells
    out.diameter = -std::log(out.phi_root * std::pow(2.0, -double(B)));
    out.diameter_i = B - 2;
    out.diameter_j = B - 1;
    out.op_norm_p_transpose = double(nu);
    out.laplacian_norm_ub = (3.0 + nu) / 2.0;
    return out;
}

// ---------------------------------------------------------------------------
// bundle
// ---------------------------------------------------------------------------

/// All Markov-geometric data of a strongly connected digraph, with provenance.
struct MarkovMetrics {
    Eigen::MatrixXd P;
    Eigen::VectorXd phi;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd E;
    Eigen::MatrixXd d;
    Eigen::MatrixXd laplacian;
    std::string provenance;  // "exact" | "monte-carlo"
};

inline MarkovMetrics compute_metrics(const Digraph& g,
                                     HittingMethod method = HittingMethod::Exact,
                                     const MonteCarloParams& params = {}, unsigned jobs = 1) {
    if (!g.strongly_connected())
        throw std::invalid_argument("compute_metrics: digraph is not strongly connected");
    MarkovMetrics m;
    m.P = transition_matrix(g);
    m.phi = perron_vector(m.P);
    m.Q = hitting_probabilities(m.P, method, params, jobs);
    // Monte Carlo estimates carry sampling error; loosen the symmetry gate accordingly
    const double sym_tol = method == HittingMethod::Exact
                               ? 1e-8
                               : 6.0 / std::sqrt(double(params.trials));
    m.E = normalized_hitting(m.phi, m.Q, sym_tol);
    m.d = hitting_metric(m.E);
    m.laplacian = laplacian(m.P, m.phi);
    m.provenance = method == HittingMethod::Exact ? "exact" : "monte-carlo";
    return m;
}

} // namespace looplab::graph_metric
