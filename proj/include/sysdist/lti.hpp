#pragma once

// SISO LTI system representations: state-space and rational transfer function
// forms, affine parametric families with Gaussian parameters, and seeded
// ensemble sampling.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sysdist/rng.hpp"

namespace sysdist {

struct StateSpaceModel {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x 1
    Eigen::MatrixXd C;  // 1 x n
    double D = 0.0;

    Eigen::Index order() const { return A.rows(); }

    void validate() const {
        if (A.rows() < 1 || A.rows() != A.cols())
            throw std::invalid_argument("A must be square, n >= 1");
        if (B.rows() != A.rows() || B.cols() != 1)
            throw std::invalid_argument("B must be n x 1");
        if (C.cols() != A.rows() || C.rows() != 1)
            throw std::invalid_argument("C must be 1 x n");
    }
};

inline bool is_hurwitz(const Eigen::MatrixXd& A, double tol = 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        if (es.eigenvalues()(i).real() >= -tol) return false;
    return true;
}

// Polynomial coefficients in ascending powers of s.
using Poly = std::vector<double>;

inline int poly_degree(const Poly& p) {
    int d = static_cast<int>(p.size()) - 1;
    while (d > 0 && p[static_cast<std::size_t>(d)] == 0.0) --d;
    return d;
}

inline std::complex<double> poly_eval(const Poly& p, std::complex<double> s) {
    std::complex<double> acc(0.0, 0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
    return acc;
}

inline std::vector<std::complex<double>> poly_roots(const Poly& p) {
    int d = poly_degree(p);
    if (d == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    double lead = p[static_cast<std::size_t>(d)];
    for (int i = 0; i < d; ++i) companion(0, i) = -p[static_cast<std::size_t>(d - 1 - i)] / lead;
    companion.block(1, 0, d - 1, d - 1).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

struct RationalTransferFunction {
    Poly num;
    Poly den;

    // Proper rational function with no poles on the imaginary axis.
    void validate(double axis_tol = 1e-9) const {
        if (den.empty() || den.back() == 0.0)
            throw std::invalid_argument("den leading coefficient must be nonzero");
        if (poly_degree(num) > poly_degree(den))
            throw std::invalid_argument("transfer function must be proper");
        double scale = 1.0;
        auto roots = poly_roots(den);
        for (const auto& r : roots) scale = std::max(scale, std::abs(r));
        for (const auto& r : roots)
            if (std::abs(r.real()) <= axis_tol * scale)
                throw std::invalid_argument("pole on the imaginary axis");
    }

    int rhp_pole_count() const {
        int count = 0;
        for (const auto& r : poly_roots(den))
            if (r.real() > 0.0) ++count;
        return count;
    }

    // Relative degree deg(den) - deg(num); num identically zero counts as
    // relative degree deg(den).
    int relative_degree() const {
        bool zero = true;
        for (double c : num)
            if (c != 0.0) zero = false;
        if (zero) return poly_degree(den);
        return poly_degree(den) - poly_degree(num);
    }
};

struct FamilyDirection {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
};

struct AffineParametricFamily {
    StateSpaceModel base;
    std::vector<FamilyDirection> directions;
    Eigen::VectorXd nominal_theta;  // parameter value reproducing the nominal model

    Eigen::Index parameter_dim() const { return static_cast<Eigen::Index>(directions.size()); }

    void validate() const {
        base.validate();
        for (const auto& dir : directions) {
            if (dir.A.rows() != base.A.rows() || dir.A.cols() != base.A.cols() ||
                dir.B.rows() != base.B.rows() || dir.B.cols() != base.B.cols() ||
                dir.C.rows() != base.C.rows() || dir.C.cols() != base.C.cols())
                throw std::invalid_argument("direction dimensions must match the base model");
        }
        if (nominal_theta.size() != parameter_dim())
            throw std::invalid_argument("nominal_theta length must equal the direction count");
    }
};

struct GaussianParameter {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    void validate() const {
        if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
            throw std::invalid_argument("covariance dimensions must match the mean");
        covariance_factor(covariance);  // throws unless symmetric PSD
    }
};

struct SystemEnsemble {
    AffineParametricFamily family;
    std::vector<std::pair<Eigen::VectorXd, StateSpaceModel>> samples;
    std::uint64_t seed = 0;

    StateSpaceModel nominal() const;
};

inline StateSpaceModel instantiate(const AffineParametricFamily& family,
                                   const Eigen::VectorXd& theta) {
    if (theta.size() != family.parameter_dim())
        throw std::invalid_argument("theta length must equal the direction count");
    StateSpaceModel out = family.base;
    out.D = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const auto& dir = family.directions[static_cast<std::size_t>(k)];
        out.A += theta(k) * dir.A;
        out.B += theta(k) * dir.B;
        out.C += theta(k) * dir.C;
    }
    return out;
}

inline StateSpaceModel SystemEnsemble::nominal() const {
    return instantiate(family, family.nominal_theta);
}

inline Eigen::VectorXd vectorize_model(const StateSpaceModel& m) {
    Eigen::Index n = m.A.rows();
    Eigen::Index p = n * n + m.B.size() + m.C.size();
    Eigen::VectorXd z(p);
    Eigen::Index at = 0;
    // Column-major vec of A, then B, then C.
    z.segment(at, n * n) = Eigen::Map<const Eigen::VectorXd>(m.A.data(), n * n);
    at += n * n;
    z.segment(at, m.B.size()) = Eigen::Map<const Eigen::VectorXd>(m.B.data(), m.B.size());
    at += m.B.size();
    z.segment(at, m.C.size()) = Eigen::Map<const Eigen::VectorXd>(m.C.data(), m.C.size());
    return z;
}

// Stacks the family into (z0, J) so that vec(instantiate(theta)) = z0 + J theta.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> vectorize_family(
    const AffineParametricFamily& family) {
    Eigen::VectorXd z0 = vectorize_model(family.base);
    Eigen::MatrixXd J(z0.size(), family.parameter_dim());
    for (Eigen::Index k = 0; k < family.parameter_dim(); ++k) {
        const auto& dir = family.directions[static_cast<std::size_t>(k)];
        StateSpaceModel tmp{dir.A, dir.B, dir.C, 0.0};
        J.col(k) = vectorize_model(tmp);
    }
    return {z0, J};
}

// Gaussian law of the vectorized plant under the affine family.
inline GaussianParameter pushforward_gaussian(const AffineParametricFamily& family,
                                              const GaussianParameter& param) {
    if (param.mean.size() != family.parameter_dim())
        throw std::invalid_argument("parameter dimension mismatch");
    auto [z0, J] = vectorize_family(family);
    GaussianParameter out;
    out.mean = J * param.mean + z0;
    Eigen::MatrixXd cov = J * param.covariance * J.transpose();
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

// Draws are generated sequentially from one stream, so determinism does not
// depend on any downstream parallelism.
inline SystemEnsemble sample_ensemble(const AffineParametricFamily& family,
                                      const GaussianParameter& param, int count,
                                      std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("ensemble size must be >= 1");
    if (param.mean.size() != family.parameter_dim())
        throw std::invalid_argument("parameter dimension mismatch");
    Eigen::MatrixXd L = covariance_factor(param.covariance);
    GaussianStream stream(seed);
    SystemEnsemble ensemble;
    ensemble.family = family;
    ensemble.seed = seed;
    ensemble.samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd theta = param.mean + L * stream.next_vector(param.mean.size());
        ensemble.samples.emplace_back(theta, instantiate(family, theta));
    }
    return ensemble;
}

inline std::complex<double> frequency_response(const StateSpaceModel& m, double omega) {
    Eigen::Index n = m.order();
    Eigen::MatrixXcd resolvent = std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
                                 m.A.cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
    double rcond_proxy = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (rcond_proxy < 1e-12 * std::max(1.0, m.A.cwiseAbs().maxCoeff()))
        throw std::domain_error("frequency_response: pole on the imaginary axis at this omega");
    Eigen::VectorXcd x = lu.solve(m.B.cast<std::complex<double>>());
    return (m.C.cast<std::complex<double>>() * x)(0, 0) + m.D;
}

inline std::complex<double> frequency_response(const RationalTransferFunction& tf, double omega) {
    std::complex<double> s(0.0, omega);
    std::complex<double> d = poly_eval(tf.den, s);
    if (std::abs(d) < 1e-300) throw std::domain_error("frequency_response: pole at this omega");
    return poly_eval(tf.num, s) / d;
}

// Faddeev-LeVerrier resolvent expansion. No common-factor cancellation is
// performed; near-cancellations are left to the caller.
inline RationalTransferFunction realize_transfer_function(const StateSpaceModel& m) {
    m.validate();
    Eigen::Index n = m.order();
    // den(s) = s^n + c[n-1] s^(n-1) + ... + c[0]
    // adj(sI - A) = sum_k M_k s^(n-1-k),  M_0 = I, M_k = A M_{k-1} + c_{n-k} I
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    Poly num_desc(static_cast<std::size_t>(n), 0.0);  // descending, degree n-1
    num_desc[0] = (m.C * M * m.B)(0, 0);
    for (Eigen::Index k = 1; k < n; ++k) {
        Eigen::MatrixXd AM = m.A * M;
        double ck = -AM.trace() / static_cast<double>(k);
        c[static_cast<std::size_t>(n - k)] = ck;
        M = AM + ck * Eigen::MatrixXd::Identity(n, n);
        num_desc[static_cast<std::size_t>(k)] = (m.C * M * m.B)(0, 0);
    }
    c[0] = -(m.A * M).trace() / static_cast<double>(n);

    RationalTransferFunction tf;
    tf.den.assign(c.begin(), c.end());
    tf.num.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index k = 0; k < n; ++k)
        tf.num[static_cast<std::size_t>(n - 1 - k)] = num_desc[static_cast<std::size_t>(k)];
    if (m.D != 0.0)
        for (std::size_t i = 0; i < tf.den.size(); ++i) tf.num[i] += m.D * tf.den[i];
    return tf;
}

// Controllable canonical realization of a proper transfer function.
inline StateSpaceModel tf_to_ss(const RationalTransferFunction& tf) {
    int n = poly_degree(tf.den);
    if (n == 0) {
        // Constant gain; represent with an inert stable state.
        StateSpaceModel m;
        m.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
        m.B = Eigen::MatrixXd::Zero(1, 1);
        m.C = Eigen::MatrixXd::Zero(1, 1);
        m.D = tf.num.empty() ? 0.0 : tf.num[0] / tf.den[0];
        return m;
    }
    double lead = tf.den[static_cast<std::size_t>(n)];
    Poly den(static_cast<std::size_t>(n) + 1), num(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i) den[static_cast<std::size_t>(i)] = tf.den[static_cast<std::size_t>(i)] / lead;
    for (std::size_t i = 0; i < tf.num.size() && i <= static_cast<std::size_t>(n); ++i)
        num[i] = tf.num[i] / lead;
    double d_term = num[static_cast<std::size_t>(n)];
    StateSpaceModel m;
    m.A = Eigen::MatrixXd::Zero(n, n);
    m.A.block(0, 1, n - 1, n - 1).setIdentity();
    for (int i = 0; i < n; ++i) m.A(n - 1, i) = -den[static_cast<std::size_t>(i)];
    m.B = Eigen::MatrixXd::Zero(n, 1);
    m.B(n - 1, 0) = 1.0;
    m.C = Eigen::MatrixXd::Zero(1, n);
    for (int i = 0; i < n; ++i)
        m.C(0, i) = num[static_cast<std::size_t>(i)] - d_term * den[static_cast<std::size_t>(i)];
    m.D = d_term;
    return m;
}

}  // namespace sysdist
