#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace looplab::aitchison {

/// A strictly positive probability vector in the open simplex.
/// Entries > 0 and sum to 1 (tolerance 1e-12); dimension m >= 2.
class Composition {
  public:
    explicit Composition(Eigen::VectorXd p) : p_(std::move(p)) {
        if (p_.size() < 2) throw std::invalid_argument("Composition: need m >= 2");
        for (Eigen::Index i = 0; i < p_.size(); ++i)
            if (!(p_[i] > 0.0)) throw std::invalid_argument("Composition: entries must be > 0");
        if (std::abs(p_.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("Composition: entries must sum to 1");
    }

    static Composition uniform(int m) {
        return Composition(Eigen::VectorXd::Constant(m, 1.0 / m));
    }

    int m() const { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_[i]; }
    const Eigen::VectorXd& vec() const { return p_; }

  private:
    Eigen::VectorXd p_;
};

/// Helmert basis of the zero-sum hyperplane in R^m: m-1 orthonormal vectors,
/// each summing to zero. Row i-1 is e^i.
inline Eigen::MatrixXd helmert_basis(int m) {
    if (m < 2) throw std::invalid_argument("helmert_basis: need m >= 2");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m - 1, m);
    for (int i = 1; i < m; ++i) {
        const double scale = std::sqrt(double(i) / (i + 1.0));
        for (int j = 0; j < i; ++j) H(i - 1, j) = scale / i;
        H(i - 1, i) = -scale;
    }
    return H;
}

/// Centered log-ratio transform; output sums to zero.
inline Eigen::VectorXd clr(const Composition& p) {
    Eigen::VectorXd lp = p.vec().array().log();
    return lp.array() - lp.mean();
}

/// Isometric log-ratio transform: clr coordinates projected on the Helmert basis.
inline Eigen::VectorXd ilr(const Composition& p) {
    return helmert_basis(p.m()) * clr(p);
}

/// Inverse ilr: maps all of R^(m-1) onto the open simplex.
inline Composition ilr_inverse(const Eigen::VectorXd& y, int m) {
    if (y.size() != m - 1) throw std::invalid_argument("ilr_inverse: y must have length m-1");
    Eigen::VectorXd c = helmert_basis(m).transpose() * y;
    // shift before exponentiating so large coordinates stay finite
    Eigen::VectorXd e = (c.array() - c.maxCoeff()).exp();
    return Composition(e / e.sum());
}

inline double inner(const Composition& p, const Composition& q) {
    if (p.m() != q.m()) throw std::invalid_argument("aitchison::inner: dimension mismatch");
    return clr(p).dot(clr(q));
}

/// The double-sum form of the inner product, (1/2m) sum_ij log(pi/pj) log(qi/qj).
/// Kept as an independent route for cross-checking the clr form.
inline double inner_double_sum(const Composition& p, const Composition& q) {
    if (p.m() != q.m()) throw std::invalid_argument("aitchison::inner_double_sum: dimension mismatch");
    const int m = p.m();
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            acc += std::log(p[i] / p[j]) * std::log(q[i] / q[j]);
    return acc / (2.0 * m);
}

inline double norm(const Composition& p) { return clr(p).norm(); }

inline double distance(const Composition& p, const Composition& q) {
    if (p.m() != q.m()) throw std::invalid_argument("aitchison::distance: dimension mismatch");
    return (clr(p) - clr(q)).norm();
}

} // namespace looplab::aitchison
