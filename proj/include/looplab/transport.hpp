#pragma once

#include "looplab/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab::transport {

/// Finite metric space given by its distance matrix.
struct FiniteMetricSpace {
    Eigen::MatrixXd d;
    std::vector<std::string> labels;

    explicit FiniteMetricSpace(Eigen::MatrixXd dist, std::vector<std::string> lab = {})
        : d(std::move(dist)), labels(std::move(lab)) {
        const Eigen::Index k = d.rows();
        if (d.cols() != k || k < 1) throw std::invalid_argument("FiniteMetricSpace: square matrix required");
        for (Eigen::Index i = 0; i < k; ++i) {
            if (d(i, i) != 0.0) throw std::invalid_argument("FiniteMetricSpace: nonzero diagonal");
            for (Eigen::Index j = 0; j < k; ++j) {
                if (std::abs(d(i, j) - d(j, i)) > 1e-12)
                    throw std::invalid_argument("FiniteMetricSpace: asymmetric distances");
                if (i != j && !(d(i, j) > 0.0))
                    throw std::invalid_argument("FiniteMetricSpace: non-positive off-diagonal distance");
            }
        }
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index l = 0; l < k; ++l)
                    if (d(i, j) > d(i, l) + d(l, j) + 1e-9)
                        throw std::invalid_argument("FiniteMetricSpace: triangle inequality violated");
    }

    std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
    double diameter() const { return d.maxCoeff(); }
};

/// Entrywise d^alpha for alpha in (0,1]; metric axioms survive snowflaking.
inline FiniteMetricSpace snowflake(const FiniteMetricSpace& space, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("snowflake: alpha must be in (0,1]");
    Eigen::MatrixXd s = space.d.array().pow(alpha);
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = 0.0;
    return FiniteMetricSpace(std::move(s), space.labels);
}

/// Probability weights on the points of a space.
struct DiscreteMeasure {
    Eigen::VectorXd w;

    explicit DiscreteMeasure(Eigen::VectorXd weights) : w(std::move(weights)) {
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (w(i) < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
        if (std::abs(w.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
    }

    static DiscreteMeasure uniform(std::size_t k) {
        return DiscreteMeasure(Eigen::VectorXd::Constant(k, 1.0 / double(k)));
    }

    static DiscreteMeasure dirac(std::size_t k, std::size_t at) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        w(at) = 1.0;
        return DiscreteMeasure(std::move(w));
    }

    static DiscreteMeasure from_counts(const std::vector<std::size_t>& counts, std::size_t k) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        for (auto c : counts) w(c) += 1.0;
        w /= double(counts.size());
        return DiscreteMeasure(std::move(w));
    }
};

struct TransportPlan {
    double cost = 0.0;
    Eigen::MatrixXd flow;           // flow(i,j) = mass moved from point i to point j
    Eigen::VectorXd sink_potential; // optimal dual v (sink side)
};

namespace detail {

/// Exact min-cost flow on the complete bipartite support graph by successive
/// shortest paths with node potentials (Dijkstra). Costs must be nonnegative.
inline TransportPlan min_cost_transport(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                                        const Eigen::MatrixXd& cost) {
    const Eigen::Index n = mu.size();
    constexpr double INF = std::numeric_limits<double>::infinity();
    constexpr double EPS = 1e-15;
    Eigen::VectorXd rem_s = mu, rem_t = nu;
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> pot(2 * n, 0.0);  // 0..n-1 sources, n..2n-1 sinks
    std::vector<double> dist(2 * n);
    std::vector<int> par(2 * n);

    while (true) {
        bool any = false;
        for (Eigen::Index i = 0; i < n; ++i) any |= rem_s(i) > EPS;
        if (!any) break;
        std::fill(dist.begin(), dist.end(), INF);
        std::fill(par.begin(), par.end(), -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (Eigen::Index i = 0; i < n; ++i)
            if (rem_s(i) > EPS) { dist[i] = 0.0; pq.emplace(0.0, int(i)); }
        while (!pq.empty()) {
            auto [dd, u] = pq.top();
            pq.pop();
            if (dd > dist[u] + 1e-18) continue;
            if (u < n) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double w = std::max(cost(u, j) + pot[u] - pot[n + j], 0.0);
                    if (dist[u] + w < dist[n + j] - 1e-18) {
                        dist[n + j] = dist[u] + w;
                        par[n + j] = u;
                        pq.emplace(dist[n + j], int(n + j));
                    }
                }
            } else {
                const Eigen::Index j = u - n;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (flow(i, j) <= EPS) continue;
                    const double w = std::max(-cost(i, j) + pot[u] - pot[i], 0.0);
                    if (dist[u] + w < dist[i] - 1e-18) {
                        dist[i] = dist[u] + w;
                        par[i] = u;
                        pq.emplace(dist[i], int(i));
                    }
                }
            }
        }
        int best = -1;
        double bd = INF;
        for (Eigen::Index j = 0; j < n; ++j)
            if (rem_t(j) > EPS && dist[n + j] < bd) { bd = dist[n + j]; best = int(n + j); }
        if (best < 0) throw std::runtime_error("min_cost_transport: no augmenting path (unbalanced?)");
        for (int v = 0; v < 2 * n; ++v)
            if (dist[v] < INF) pot[v] += dist[v];
        // walk the path back to a source, then push the bottleneck amount
        double amt = rem_t(best - n);
        int v = best;
        while (par[v] != -1) {
            const int u = par[v];
            if (u >= n && v < n) amt = std::min(amt, flow(v, u - n));
            v = u;
        }
        amt = std::min(amt, rem_s(v));
        v = best;
        while (par[v] != -1) {
            const int u = par[v];
            if (u < n)
                flow(u, v - n) += amt;
            else
                flow(v, u - n) -= amt;
            v = u;
        }
        rem_s(v) -= amt;
        rem_t(best - n) -= amt;
    }
    TransportPlan plan;
    plan.flow = flow;
    plan.cost = (flow.array() * cost.array()).sum();
    plan.sink_potential.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) plan.sink_potential(j) = pot[n + j];
    return plan;
}

} // namespace detail

/// Optimal transport cost between measures on the same space under the
/// snowflaked ground metric d^alpha; equals the Hölder dual formulation by
/// Kantorovich-Rubinstein since d^alpha is itself a metric.
inline TransportPlan wasserstein_alpha_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                            const FiniteMetricSpace& space, double alpha) {
    if (mu.w.size() != Eigen::Index(space.size()) || nu.w.size() != Eigen::Index(space.size()))
        throw std::invalid_argument("wasserstein_alpha: measure/space size mismatch");
    const FiniteMetricSpace snow = snowflake(space, alpha);
    return detail::min_cost_transport(mu.w, nu.w, snow.d);
}

inline double wasserstein_alpha(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const FiniteMetricSpace& space, double alpha) {
    return wasserstein_alpha_plan(mu, nu, space, alpha).cost;
}

/// Reconstructs a Kantorovich potential from the solver duals: the cost
/// transform of the sink potential. The value gap sum f d(mu-nu) equals the
/// primal cost at the optimum, and f is 1-Lipschitz under the ground cost.
inline Eigen::VectorXd kantorovich_potential(const TransportPlan& plan,
                                             const FiniteMetricSpace& space, double alpha) {
    const FiniteMetricSpace snow = snowflake(space, alpha);
    const Eigen::Index n = snow.d.rows();
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            best = std::min(best, snow.d(i, j) - plan.sink_potential(j));
        f(i) = best;
    }
    return f;
}

/// Exact 1-D Wasserstein-1 between weighted point sets via the CDF coupling.
inline double wasserstein_1d(std::vector<std::pair<double, double>> xs,
                             std::vector<std::pair<double, double>> ys) {
    auto normalize = [](std::vector<std::pair<double, double>>& v) {
        double s = 0.0;
        for (auto& [x, w] : v) {
            if (w < 0.0) throw std::invalid_argument("wasserstein_1d: negative weight");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("wasserstein_1d: weights must sum to 1");
        std::sort(v.begin(), v.end());
    };
    normalize(xs);
    normalize(ys);
    std::vector<double> grid;
    grid.reserve(xs.size() + ys.size());
    for (auto& [x, w] : xs) grid.push_back(x);
    for (auto& [y, w] : ys) grid.push_back(y);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double acc = 0.0, F = 0.0, G = 0.0;
    std::size_t a = 0, b = 0;
    for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
        while (a < xs.size() && xs[a].first <= grid[g]) F += xs[a++].second;
        while (b < ys.size() && ys[b].first <= grid[g]) G += ys[b++].second;
        acc += std::abs(F - G) * (grid[g + 1] - grid[g]);
    }
    return acc;
}

/// A real coordinate per point with the measured bi-Lipschitz constants of the
/// map against the (snowflaked) source metric: R = min ratio, S = max ratio.
struct LineEmbedding {
    Eigen::VectorXd coords;
    double R = 0.0;
    double S = 0.0;

    double distortion() const { return S / R; }
};

namespace detail {

inline std::pair<double, double> measure_ratios(const Eigen::VectorXd& coords,
                                                const Eigen::MatrixXd& d) {
    double R = std::numeric_limits<double>::infinity(), S = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
            const double r = std::abs(coords(i) - coords(j)) / d(i, j);
            R = std::min(R, r);
            S = std::max(S, r);
        }
    return {R, S};
}

/// Classical 1-D multidimensional scaling: top eigenvector of the
/// double-centered squared-distance Gram matrix.
inline Eigen::VectorXd mds_1d(const Eigen::MatrixXd& d) {
    const Eigen::Index k = d.rows();
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / double(k));
    Eigen::MatrixXd B = -0.5 * J * d.cwiseProduct(d) * J;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    const Eigen::Index top = k - 1;  // eigenvalues ascending
    const double lam = std::max(es.eigenvalues()(top), 0.0);
    return es.eigenvectors().col(top) * std::sqrt(lam > 0.0 ? lam : 1.0);
}

/// Coordinate descent on the distortion S/R: each point tries a candidate set
/// of positions built from the other points' coordinates and the current
/// ratio landmarks.
inline Eigen::VectorXd refine_coords(Eigen::VectorXd coords, const Eigen::MatrixXd& d,
                                     int max_sweeps = 60) {
    const Eigen::Index k = d.rows();
    auto [R, S] = measure_ratios(coords, d);
    double ratio = (R > 0.0) ? S / R : std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (Eigen::Index i = 0; i < k; ++i) {
            std::vector<double> cands{coords(i)};
            const double lm[4] = {R, 0.5 * (R + S), S, 1.0};
            for (Eigen::Index j = 0; j < k; ++j) {
                if (j == i) continue;
                for (double t : lm) {
                    cands.push_back(coords(j) + t * d(i, j));
                    cands.push_back(coords(j) - t * d(i, j));
                }
            }
            double best_c = coords(i), best_ratio = ratio;
            for (double c : cands) {
                const double saved = coords(i);
                coords(i) = c;
                auto [r2, s2] = measure_ratios(coords, d);
                const double cand_ratio = (r2 > 0.0) ? s2 / r2 : std::numeric_limits<double>::infinity();
                if (cand_ratio < best_ratio - 1e-12) {
                    best_ratio = cand_ratio;
                    best_c = c;
                }
                coords(i) = saved;
            }
            if (best_c != coords(i)) {
                coords(i) = best_c;
                std::tie(R, S) = measure_ratios(coords, d);
                ratio = S / R;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return coords;
}

inline void break_ties(Eigen::VectorXd& coords, const Eigen::MatrixXd& d, std::uint64_t seed) {
    double min_pos = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) min_pos = std::min(min_pos, d(i, j));
    const double eps = 1e-9 * min_pos;
    auto g = make_stream(seed, 0x7135ULL);
    for (Eigen::Index i = 0; i < coords.size(); ++i)
        for (Eigen::Index j = i + 1; j < coords.size(); ++j)
            if (coords(i) == coords(j)) coords(j) += eps * (1.0 + uniform01(g));
}

} // namespace detail

/// Heuristic embedding of an (already snowflaked) metric into the line:
/// classical MDS start plus a few seeded restarts, each refined by coordinate
/// descent on the distortion; measured (R, S) recorded.
inline LineEmbedding embed_line_heuristic(const FiniteMetricSpace& snowflaked,
                                          int restarts = 6, std::uint64_t seed = 2024) {
    const Eigen::MatrixXd& d = snowflaked.d;
    const Eigen::Index k = d.rows();
    if (k == 1) return LineEmbedding{Eigen::VectorXd::Zero(1), 1.0, 1.0};
    Eigen::VectorXd best;
    double best_ratio = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd base = detail::mds_1d(d);
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd start = base;
        if (r > 0) {
            auto g = make_stream(seed, r);
            for (Eigen::Index i = 0; i < k; ++i)
                start(i) += (uniform01(g) - 0.5) * snowflaked.diameter() * 0.5;
        }
        Eigen::VectorXd c = detail::refine_coords(std::move(start), d);
        auto [R, S] = detail::measure_ratios(c, d);
        if (R > 0.0 && S / R < best_ratio) {
            best_ratio = S / R;
            best = std::move(c);
        }
    }
    if (best.size() == 0) throw std::runtime_error("embed_line_heuristic: refinement degenerate");
    detail::break_ties(best, d, seed);
    auto [R, S] = detail::measure_ratios(best, d);
    if (!(R > 0.0)) throw std::runtime_error("embed_line_heuristic: embedding not injective");
    return LineEmbedding{std::move(best), R, S};
}

/// Oracle for near-optimality on small spaces: best of many random-restart
/// local searches, seeded with the heuristic's own output so its distortion
/// can never exceed the heuristic's.
inline LineEmbedding embed_line_bruteforce(const FiniteMetricSpace& snowflaked,
                                           int restarts = 200, std::uint64_t seed = 4096) {
    const Eigen::MatrixXd& d = snowflaked.d;
    const Eigen::Index k = d.rows();
    if (k > 8) throw std::invalid_argument("embed_line_bruteforce: limited to k <= 8");
    LineEmbedding heur = embed_line_heuristic(snowflaked);
    Eigen::VectorXd best = heur.coords;
    double best_ratio = heur.distortion();
    const double diam = snowflaked.diameter();
    for (int r = 0; r < restarts; ++r) {
        auto g = make_stream(seed, 100 + r);
        Eigen::VectorXd start(k);
        for (Eigen::Index i = 0; i < k; ++i) start(i) = uniform01(g) * diam;
        Eigen::VectorXd c = detail::refine_coords(std::move(start), d);
        auto [R, S] = detail::measure_ratios(c, d);
        if (R > 0.0 && S / R < best_ratio - 1e-15) {
            best_ratio = S / R;
            best = std::move(c);
        }
    }
    detail::break_ties(best, d, seed);
    auto [R, S] = detail::measure_ratios(best, d);
    return LineEmbedding{std::move(best), R, S};
}

struct SandwichReport {
    double w_alpha = 0.0;
    double w_line = 0.0;
    double upper_slack = 0.0;  // R^{-1} W_1 - W_alpha, must be >= -1e-8
    double lower_slack = 0.0;  // S W_alpha - W_1,  must be >= -1e-8
    bool ok = false;
};

/// Pushes both measures through the embedding and checks
/// W_alpha <= R^{-1} W_1(pushforwards) and W_1(pushforwards) <= S W_alpha.
inline SandwichReport sandwich_check(const FiniteMetricSpace& space, double alpha,
                                     const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const LineEmbedding& emb, double slack = 1e-8) {
    if (!(emb.R > 0.0)) throw std::invalid_argument("sandwich_check: embedding must be injective");
    SandwichReport rep;
    rep.w_alpha = wasserstein_alpha(mu, nu, space, alpha);
    std::vector<std::pair<double, double>> push_mu, push_nu;
    for (Eigen::Index i = 0; i < emb.coords.size(); ++i) {
        push_mu.emplace_back(emb.coords(i), mu.w(i));
        push_nu.emplace_back(emb.coords(i), nu.w(i));
    }
    rep.w_line = wasserstein_1d(std::move(push_mu), std::move(push_nu));
    rep.upper_slack = rep.w_line / emb.R - rep.w_alpha;
    rep.lower_slack = emb.S * rep.w_alpha - rep.w_line;
    rep.ok = rep.upper_slack >= -slack && rep.lower_slack >= -slack;
    return rep;
}

} // namespace looplab::transport
