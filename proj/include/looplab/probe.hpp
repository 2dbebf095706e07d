#pragma once

#include "looplab/aitchison.hpp"
#include "looplab/circuit.hpp"
#include "looplab/graph_metric.hpp"
#include "looplab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab::probe {

/// Certainty level and gate count of the node probe. eta strictly inside (0,1).
struct ProbeParams {
    double eta = 0.8;
    int m = 3;

    void validate() const {
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("ProbeParams: eta must be in (0,1)");
        if (m < 2) throw std::invalid_argument("ProbeParams: m must be >= 2");
    }
};

/// Noisy categorical description of the gate at an internal node: mass eta on
/// the configured gate, the rest spread uniformly over the other candidates.
inline aitchison::Composition probe_output(const ProbeParams& params,
                                           const circuit::TreeTopology& topo,
                                           const circuit::GateConfiguration& config,
                                           std::size_t node) {
    params.validate();
    if (!topo.is_internal(node)) throw std::invalid_argument("probe_output: node is not internal");
    const int g = config.at(topo, node);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(params.m, (1.0 - params.eta) / (params.m - 1));
    p(g) = params.eta;
    return aitchison::Composition(p);
}

inline aitchison::Composition probe_output_for_gate(const ProbeParams& params, int gate_index) {
    params.validate();
    Eigen::VectorXd p = Eigen::VectorXd::Constant(params.m, (1.0 - params.eta) / (params.m - 1));
    p(gate_index) = params.eta;
    return aitchison::Composition(p);
}

/// Largest pairwise output separation over gate assignments. Probe outputs for
/// two distinct gates differ by a transposition, so this is
/// sqrt(2) |log(eta (m-1) / (1-eta))|; the brute-force maximum over all gate
/// pairs is used in tests to confirm the closed form.
inline double probe_complexity(const ProbeParams& params) {
    params.validate();
    return std::sqrt(2.0) * std::abs(std::log(params.eta * (params.m - 1) / (1.0 - params.eta)));
}

inline double probe_complexity_brute_force(const ProbeParams& params) {
    double best = 0.0;
    for (int a = 0; a < params.m; ++a)
        for (int b = 0; b < params.m; ++b)
            best = std::max(best, aitchison::distance(probe_output_for_gate(params, a),
                                                      probe_output_for_gate(params, b)));
    return best;
}

enum class Activation { ReluLike, TanhLike, Identity };

inline Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::ReluLike;
    if (s == "tanh") return Activation::TanhLike;
    if (s == "identity") return Activation::Identity;
    throw std::invalid_argument("parse_activation: unknown activation '" + s + "'");
}

inline std::string activation_name(Activation a) {
    switch (a) {
        case Activation::ReluLike: return "relu";
        case Activation::TanhLike: return "tanh";
        default: return "identity";
    }
}

inline double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::ReluLike: return x > 0.0 ? x : 0.0;
        case Activation::TanhLike: return std::tanh(x);
        default: return x;
    }
}

/// Graph-convolutional hypothesis: depth L, hop count p, weights W_1..W_L with
/// sup-operator-norm budgets beta_l, and a 1-Lipschitz activation.
struct GcnHypothesis {
    int L = 1;
    int p = 1;
    std::vector<int> dims;                 // length L+1, dims[0]=1, dims[L]=m-1
    std::vector<Eigen::MatrixXd> weights;  // W_l is dims[l] x dims[l-1]
    std::vector<double> budgets;           // beta_1..beta_L
    Activation activation = Activation::ReluLike;

    void validate() const {
        if (L < 1) throw std::invalid_argument("GcnHypothesis: L must be >= 1");
        if (p < 1) throw std::invalid_argument("GcnHypothesis: p must be >= 1");
        if (static_cast<int>(dims.size()) != L + 1 || static_cast<int>(weights.size()) != L ||
            static_cast<int>(budgets.size()) != L)
            throw std::invalid_argument("GcnHypothesis: inconsistent layer counts");
        for (int l = 0; l < L; ++l) {
            if (weights[l].rows() != dims[l + 1] || weights[l].cols() != dims[l])
                throw std::invalid_argument("GcnHypothesis: weight shape mismatch");
            if (graph_metric::op_norm_inf(weights[l]) > budgets[l] + 1e-12)
                throw std::invalid_argument("GcnHypothesis: norm budget exceeded at layer " +
                                            std::to_string(l + 1));
        }
    }
};

/// Forward pass. H_0 = x as a 1 x s row; hidden layers apply the p-hop
/// convolution then the activation; the final layer is the bare linear map
/// W_L H_{L-1} (no convolution, no activation). Output is (m-1) x s.
inline Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& laplacian_gamma,
                                   const GcnHypothesis& hyp, const Eigen::VectorXd& x) {
    hyp.validate();
    const Eigen::Index s = laplacian_gamma.rows();
    if (laplacian_gamma.cols() != s) throw std::invalid_argument("gcn_forward: laplacian must be square");
    if (x.size() != s) throw std::invalid_argument("gcn_forward: input length mismatch");
    Eigen::MatrixXd Dp = Eigen::MatrixXd::Identity(s, s);
    for (int i = 0; i < hyp.p; ++i) Dp = Dp * laplacian_gamma;
    Eigen::MatrixXd H = x.transpose();  // 1 x s
    for (int l = 0; l + 1 < hyp.L; ++l) {
        // (Dp H^T)^T = H Dp^T; Dp is a power of the symmetric Laplacian
        Eigen::MatrixXd Z = hyp.weights[l] * (H * Dp.transpose());
        H = Z.unaryExpr([&](double v) { return apply_activation(hyp.activation, v); });
    }
    return hyp.weights[hyp.L - 1] * H;
}

/// Forward pass mapped through ilr^{-1} column by column: one composition per
/// computation node.
inline std::vector<aitchison::Composition> hypothesis_apply(const GcnHypothesis& hyp,
                                                            const Eigen::MatrixXd& laplacian_gamma,
                                                            const Eigen::VectorXd& x, int m) {
    const Eigen::MatrixXd F = gcn_forward(laplacian_gamma, hyp, x);
    if (F.rows() != m - 1) throw std::invalid_argument("hypothesis_apply: output dimension must be m-1");
    std::vector<aitchison::Composition> out;
    out.reserve(F.cols());
    for (Eigen::Index c = 0; c < F.cols(); ++c)
        out.push_back(aitchison::ilr_inverse(F.col(c), m));
    return out;
}

/// Draws weights uniform in [-1,1], each matrix rescaled to operator norm
/// beta_l * u_l with u_l uniform in (0,1], so the budget holds exactly.
inline GcnHypothesis sample_hypothesis(const std::vector<int>& dims,
                                       const std::vector<double>& budgets, int p,
                                       Activation activation, std::mt19937_64& g) {
    GcnHypothesis hyp;
    hyp.L = static_cast<int>(budgets.size());
    hyp.p = p;
    hyp.dims = dims;
    hyp.budgets = budgets;
    hyp.activation = activation;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int l = 0; l < hyp.L; ++l) {
        Eigen::MatrixXd W(dims[l + 1], dims[l]);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = unit(g);
        double u = uniform01(g);
        if (u <= 0.0) u = 1.0;
        const double cur = graph_metric::op_norm_inf(W);
        if (cur > 0.0) W *= (budgets[l] * u) / cur;
        hyp.weights.push_back(std::move(W));
    }
    hyp.validate();
    return hyp;
}

/// Largest output separation per unit graph distance over computation-node
/// pairs; distances taken in the simplex geometry via the ilr isometry.
inline double lipschitz_measure(const GcnHypothesis& hyp, const Eigen::MatrixXd& laplacian_gamma,
                                const Eigen::VectorXd& x, const Eigen::MatrixXd& d_gamma) {
    const Eigen::MatrixXd F = gcn_forward(laplacian_gamma, hyp, x);
    const Eigen::Index s = F.cols();
    if (d_gamma.rows() != s || d_gamma.cols() != s)
        throw std::invalid_argument("lipschitz_measure: metric shape mismatch");
    double best = 0.0;
    for (Eigen::Index v = 0; v < s; ++v)
        for (Eigen::Index w = v + 1; w < s; ++w)
            best = std::max(best, (F.col(v) - F.col(w)).norm() / d_gamma(v, w));
    return best;
}

/// Closed-form bound 2 sqrt(m-1) ((3+nu)/2)^{p(L-1)} prod(beta_l) on the
/// measured constant above.
inline double lipschitz_bound(int nu, int m, int p, int L, const std::vector<double>& budgets) {
    double prod = 1.0;
    for (double b : budgets) prod *= b;
    return 2.0 * std::sqrt(double(m - 1)) * std::pow((3.0 + nu) / 2.0, double(p) * (L - 1)) * prod;
}

} // namespace looplab::probe
