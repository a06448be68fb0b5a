#pragma once

// Deterministic robust-control metrics: normalized right coprime factors via
// the control Riccati equation, H-infinity norm by Hamiltonian bisection,
// nu-gap with a winding-number check, the gap metric through directed-gap
// optimization over a stable basis for Q, and the performance measure b_{P,C}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sysdist/lti.hpp"
#include "sysdist/sphere.hpp"

namespace sysdist {

// ---------------------------------------------------------------------------
// Algebraic Riccati equation
// ---------------------------------------------------------------------------

struct CareResult {
    Eigen::MatrixXd X;
    double subspace_condition = 0.0;
};

// Stabilizing solution of A'X + XA - X B B' X + C'C = 0 from the stable
// invariant subspace of the Hamiltonian [A, -BB'; -C'C, -A'].
inline CareResult solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = A;
    H.topRightCorner(n, n) = -B * B.transpose();
    H.bottomLeftCorner(n, n) = -C.transpose() * C;
    H.bottomRightCorner(n, n) = -A.transpose();

    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    Eigen::MatrixXcd stable_basis(2 * n, n);
    Eigen::Index found = 0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        std::complex<double> lambda = es.eigenvalues()(i);
        if (std::abs(lambda.real()) < 1e-9 * scale)
            throw std::runtime_error("Hamiltonian eigenvalue too close to the imaginary axis");
        if (lambda.real() < 0.0) {
            if (found >= n) throw std::runtime_error("too many stable Hamiltonian eigenvalues");
            stable_basis.col(found++) = es.eigenvectors().col(i);
        }
    }
    if (found != n) throw std::runtime_error("no stabilizing Riccati solution");

    Eigen::MatrixXcd U1 = stable_basis.topRows(n);
    Eigen::MatrixXcd U2 = stable_basis.bottomRows(n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U1);
    double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!std::isfinite(cond) || svd.singularValues()(n - 1) < 1e-13)
        throw std::runtime_error("ill-conditioned stable subspace basis");
    Eigen::MatrixXcd Xc = U2 * U1.inverse();
    CareResult out;
    out.X = 0.5 * (Xc.real() + Xc.real().transpose());
    out.subspace_condition = cond;
    return out;
}

// ---------------------------------------------------------------------------
// Normalized right coprime factorization
// ---------------------------------------------------------------------------

// P = N D^{-1} with N, D stable and N*N + D*D = 1 on the imaginary axis.
// Realized as N = (A+BF, B, C, 0), D = (A+BF, B, F, 1) with F = -B'X.
struct NormalizedCoprimeFactors {
    Eigen::MatrixXd Acl;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;  // output row of N
    Eigen::MatrixXd F;  // output row of D (feedthrough 1)
    double subspace_condition = 0.0;

    std::complex<double> n_response(double omega) const {
        return factor_output(omega).first;
    }
    std::complex<double> d_response(double omega) const {
        return factor_output(omega).second;
    }
    std::pair<std::complex<double>, std::complex<double>> factor_output(double omega) const {
        Eigen::Index n = Acl.rows();
        Eigen::MatrixXcd resolvent =
            std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - Acl.cast<std::complex<double>>();
        Eigen::VectorXcd x = resolvent.partialPivLu().solve(B.cast<std::complex<double>>());
        std::complex<double> nv = (C.cast<std::complex<double>>() * x)(0, 0);
        std::complex<double> dv = (F.cast<std::complex<double>>() * x)(0, 0) + 1.0;
        return {nv, dv};
    }
};

inline NormalizedCoprimeFactors nrcf(const StateSpaceModel& model) {
    model.validate();
    if (model.D != 0.0)
        throw std::invalid_argument("nrcf requires zero feedthrough");
    CareResult care = solve_care(model.A, model.B, model.C);
    NormalizedCoprimeFactors f;
    f.F = -(model.B.transpose() * care.X);
    f.Acl = model.A + model.B * f.F;
    f.B = model.B;
    f.C = model.C;
    f.subspace_condition = care.subspace_condition;
    if (!is_hurwitz(f.Acl))
        throw std::runtime_error("coprime factors not stable; (A,B) may not be stabilizable");
    return f;
}

// ---------------------------------------------------------------------------
// H-infinity norm
// ---------------------------------------------------------------------------

// Bisection on gamma with the bounded-real Hamiltonian imaginary-eigenvalue
// test; relative tolerance 1e-6.
inline double hinf_norm(const StateSpaceModel& model, double rel_tol = 1e-6) {
    model.validate();
    if (!is_hurwitz(model.A))
        throw std::domain_error("hinf_norm requires a stable system");
    const Eigen::Index n = model.order();
    const double d = model.D;
    // Static gain (possibly realized with inert states): norm is exact.
    if (n == 0 || model.B.isZero(0.0) || model.C.isZero(0.0)) return std::abs(d);

    auto has_imaginary_eigenvalue = [&](double gamma) {
        double r = gamma * gamma - d * d;
        if (r <= 0.0) return true;
        Eigen::MatrixXd Ah = model.A + model.B * (d / r) * model.C;
        Eigen::MatrixXd H(2 * n, 2 * n);
        H.topLeftCorner(n, n) = Ah;
        H.topRightCorner(n, n) = model.B * model.B.transpose() / r;
        H.bottomLeftCorner(n, n) = -model.C.transpose() * (1.0 + d * d / r) * model.C;
        H.bottomRightCorner(n, n) = -Ah.transpose();
        Eigen::EigenSolver<Eigen::MatrixXd> es(H, /*computeEigenvectors=*/false);
        double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < 2 * n; ++i)
            if (std::abs(es.eigenvalues()(i).real()) < 1e-10 * scale) return true;
        return false;
    };

    // Lower bound from a coarse response probe, upper bound by doubling.
    double lo = std::abs(d);
    for (double w : {0.0, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0})
        lo = std::max(lo, std::abs(frequency_response(model, w)));
    if (lo == 0.0) {
        // Zero probe response; a zero system has norm 0, otherwise seed small.
        if (model.C.isZero(0.0) || model.B.isZero(0.0)) return std::abs(d);
        lo = 1e-12;
    }
    double hi = 2.0 * lo;
    int guard = 0;
    while (has_imaginary_eigenvalue(hi)) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("hinf_norm upper bound search failed");
    }
    lo = std::max(lo * (1.0 - 1e-9), 0.0);
    while (hi - lo > rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (has_imaginary_eigenvalue(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double hinf_norm(const RationalTransferFunction& tf, double rel_tol = 1e-6) {
    tf.validate();
    if (tf.rhp_pole_count() > 0)
        throw std::domain_error("hinf_norm requires a stable system");
    return hinf_norm(tf_to_ss(tf), rel_tol);
}

// ---------------------------------------------------------------------------
// Pointwise chordal gap and nu-gap
// ---------------------------------------------------------------------------

inline double kappa(std::complex<double> p1, std::complex<double> p2) {
    if (!std::isfinite(std::abs(p1)) || !std::isfinite(std::abs(p2)))
        throw std::invalid_argument("kappa requires finite inputs");
    return std::abs(p1 - p2) / std::sqrt((1.0 + std::norm(p1)) * (1.0 + std::norm(p2)));
}

struct FrequencyGrid {
    std::vector<double> omegas;

    static FrequencyGrid log_space(double wmin, double wmax, int count) {
        if (count < 2 || wmin <= 0.0 || wmax <= wmin)
            throw std::invalid_argument("grid requires wmax > wmin > 0 and count >= 2");
        FrequencyGrid g;
        g.omegas.resize(static_cast<std::size_t>(count));
        double l0 = std::log10(wmin), l1 = std::log10(wmax);
        for (int i = 0; i < count; ++i)
            g.omegas[static_cast<std::size_t>(i)] =
                std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(count - 1));
        return g;
    }

    static FrequencyGrid linear_space(double wmin, double wmax, int count) {
        if (count < 2 || wmin <= 0.0 || wmax <= wmin)
            throw std::invalid_argument("grid requires wmax > wmin > 0 and count >= 2");
        FrequencyGrid g;
        g.omegas.resize(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            g.omegas[static_cast<std::size_t>(i)] =
                wmin + (wmax - wmin) * static_cast<double>(i) / static_cast<double>(count - 1);
        return g;
    }

    void validate() const {
        if (omegas.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
        double prev = 0.0;
        for (double w : omegas) {
            if (!(w > prev) || !std::isfinite(w))
                throw std::invalid_argument("grid must be strictly increasing, positive, finite");
            prev = w;
        }
    }
};

struct NuGapResult {
    double value = 0.0;
    bool winding_ok = false;
    double argmax_omega = 0.0;
    std::vector<std::pair<double, double>> kappa_curve;
};

// Winding number of 1 + P2*(jw) P1(jw) over the closed Nyquist contour,
// computed by phase unwrapping on [0, wmax] (conjugate symmetry doubles it)
// with closure at infinity through the relative degrees. Each phase step must
// stay below pi/2 or the grid is declared too coarse. Returns nullopt when the
// symbol vanishes on the axis: the winding number is then undefined and the
// nu-gap condition fails by definition.
inline std::optional<int> winding_number(const RationalTransferFunction& p1,
                                         const RationalTransferFunction& p2,
                                         const FrequencyGrid& grid) {
    auto f = [&](double w) {
        return 1.0 + std::conj(frequency_response(p2, w)) * frequency_response(p1, w);
    };
    std::complex<double> f0 = f(0.0);
    if (std::abs(f0) < 1e-10) return std::nullopt;
    double phase = std::arg(f0);
    double start = phase;
    std::complex<double> prev = f0;
    for (double w : grid.omegas) {
        std::complex<double> cur = f(w);
        if (std::abs(cur) < 1e-10) return std::nullopt;
        double step = std::arg(cur / prev);
        if (std::abs(step) > M_PI / 2.0)
            throw std::runtime_error("winding check: phase step exceeds pi/2, refine the grid");
        phase += step;
        prev = cur;
    }
    // Closure: strictly proper products leave f -> 1 at infinity; otherwise the
    // limit is the real constant 1 + num_lead ratio, reached monotonically for
    // rational f, so the remaining phase change is arg(limit) - arg(prev).
    double tail1 = p1.relative_degree() > 0 ? 0.0 : p1.num.back() / p1.den.back();
    double tail2 = p2.relative_degree() > 0 ? 0.0 : p2.num.back() / p2.den.back();
    std::complex<double> limit(1.0 + tail1 * tail2, 0.0);
    double step = std::arg(limit / prev);
    if (std::abs(step) > M_PI / 2.0)
        throw std::runtime_error("winding check: closure step exceeds pi/2, extend the grid");
    phase += step;
    return static_cast<int>(std::lround((phase - start) / M_PI));
}

inline NuGapResult nu_gap(const RationalTransferFunction& p1, const RationalTransferFunction& p2,
                          const FrequencyGrid& grid) {
    p1.validate();
    p2.validate();
    grid.validate();
    NuGapResult out;
    out.kappa_curve.reserve(grid.omegas.size());
    std::size_t argmax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < grid.omegas.size(); ++i) {
        double w = grid.omegas[i];
        double k = kappa(frequency_response(p1, w), frequency_response(p2, w));
        out.kappa_curve.emplace_back(w, k);
        if (k > best) {
            best = k;
            argmax = i;
        }
    }

    std::optional<int> wno = winding_number(p1, p2, grid);
    // Standard nu-gap index balance: wno(1 + P2*P1) + eta(P1) - eta(P2) = 0,
    // with eta counting open right-half-plane poles (RLinf excludes the axis).
    out.winding_ok = wno.has_value() && (*wno + p1.rhp_pole_count() - p2.rhp_pole_count()) == 0;
    if (!out.winding_ok) {
        out.value = 1.0;
        out.argmax_omega = grid.omegas[argmax];
        return out;
    }

    // Golden-section refinement around the grid argmax (log-omega domain).
    double lo = grid.omegas[argmax > 0 ? argmax - 1 : argmax];
    double hi = grid.omegas[argmax + 1 < grid.omegas.size() ? argmax + 1 : argmax];
    auto eval = [&](double logw) {
        double w = std::exp(logw);
        return kappa(frequency_response(p1, w), frequency_response(p2, w));
    };
    double a = std::log(lo), b = std::log(hi);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d);
        }
    }
    out.value = std::max(best, std::max(fc, fd));
    out.argmax_omega = std::exp(0.5 * (a + b));
    if (std::abs(best - out.kappa_curve[argmax].second) < 1e-15 && best >= std::max(fc, fd))
        out.argmax_omega = grid.omegas[argmax];
    return out;
}

inline NuGapResult nu_gap(const StateSpaceModel& m1, const StateSpaceModel& m2,
                          const FrequencyGrid& grid) {
    return nu_gap(realize_transfer_function(m1), realize_transfer_function(m2), grid);
}

// ---------------------------------------------------------------------------
// Directed gap and gap metric
// ---------------------------------------------------------------------------

struct GapOptions {
    double wmin = 1e-3;
    double wmax = 1e3;
    int grid_points = 2000;
    double laguerre_pole = 1.0;        // rad/s, basis pole for Q(s)
    std::vector<int> q_orders = {4, 8, 16, 32};
    double order_tol = 5e-4;           // stop the order sweep below this change
    int max_lawson_iters = 150;
    double lawson_tol = 1e-7;

    static GapOptions fast() {
        GapOptions o;
        o.grid_points = 400;
        o.q_orders = {4, 8};
        o.max_lawson_iters = 60;
        return o;
    }
};

struct GapDiagnostics {
    int order_used = 0;
    int lawson_iterations = 0;
    double bracket_width = 0.0;
};

struct GapResult {
    double value = 0.0;
    double directed_12 = 0.0;
    double directed_21 = 0.0;
    GapDiagnostics diagnostics;
};

namespace detail {

// Graph-symbol responses (D(jw), N(jw)) of a factorization on a grid.
struct FactorGrid {
    Eigen::ArrayXcd d;
    Eigen::ArrayXcd n;
};

inline FactorGrid eval_factors(const NormalizedCoprimeFactors& f, const std::vector<double>& omegas) {
    FactorGrid g;
    g.d.resize(static_cast<Eigen::Index>(omegas.size()));
    g.n.resize(static_cast<Eigen::Index>(omegas.size()));
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        auto [nv, dv] = f.factor_output(omegas[i]);
        g.n(static_cast<Eigen::Index>(i)) = nv;
        g.d(static_cast<Eigen::Index>(i)) = dv;
    }
    return g;
}

// Stable basis for Q(s): psi_0 = 1 and shifted Laguerre functions
// psi_k(s) = sqrt(2a)/(s+a) * ((s-a)/(s+a))^(k-1) for k >= 1.
inline Eigen::MatrixXcd laguerre_basis(const std::vector<double>& omegas, int order, double a) {
    Eigen::MatrixXcd psi(static_cast<Eigen::Index>(omegas.size()), order + 1);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        std::complex<double> s(0.0, omegas[i]);
        psi(static_cast<Eigen::Index>(i), 0) = 1.0;
        std::complex<double> base = std::sqrt(2.0 * a) / (s + a);
        std::complex<double> shift = (s - a) / (s + a);
        std::complex<double> cur = base;
        for (int k = 1; k <= order; ++k) {
            psi(static_cast<Eigen::Index>(i), k) = cur;
            cur *= shift;
        }
    }
    return psi;
}

// Minimax fit of Q by Lawson-weighted iterated least squares: minimizes
// max_w || g1(jw) - g2(jw) Q(jw) ||_2 over real coefficients of Q in the
// basis. Returns the achieved maximum (an upper bound on the infimum for
// this order) and the iteration count through `iters_out`.
inline double lawson_directed_fit(const FactorGrid& g1, const FactorGrid& g2,
                                  const Eigen::MatrixXcd& psi, const GapOptions& opts,
                                  int* iters_out) {
    const Eigen::Index m = psi.rows();
    const Eigen::Index k = psi.cols();
    // Real LS system: rows are (Re d, Re n, Im d, Im n) residual components.
    Eigen::MatrixXd design(4 * m, k);
    Eigen::VectorXd target(4 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index c = 0; c < k; ++c) {
            std::complex<double> md = g2.d(i) * psi(i, c);
            std::complex<double> mn = g2.n(i) * psi(i, c);
            design(4 * i + 0, c) = md.real();
            design(4 * i + 1, c) = mn.real();
            design(4 * i + 2, c) = md.imag();
            design(4 * i + 3, c) = mn.imag();
        }
        target(4 * i + 0) = g1.d(i).real();
        target(4 * i + 1) = g1.n(i).real();
        target(4 * i + 2) = g1.d(i).imag();
        target(4 * i + 3) = g1.n(i).imag();
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Ones(m);
    double best = std::numeric_limits<double>::infinity();
    double prev_best = best;
    int it = 0;
    for (; it < opts.max_lawson_iters; ++it) {
        Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < m; ++i) {
            auto block = design.middleRows(4 * i, 4);
            auto tgt = target.segment(4 * i, 4);
            normal.noalias() += weights(i) * block.transpose() * block;
            rhs.noalias() += weights(i) * block.transpose() * tgt;
        }
        Eigen::VectorXd q = normal.ldlt().solve(rhs);
        Eigen::VectorXd resid = target - design * q;
        double maxnorm = 0.0;
        Eigen::VectorXd norms(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            norms(i) = resid.segment(4 * i, 4).norm();
            maxnorm = std::max(maxnorm, norms(i));
        }
        best = std::min(best, maxnorm);
        if (it > 4 && std::abs(prev_best - best) < opts.lawson_tol) break;
        prev_best = best;
        weights = weights.cwiseProduct(norms);
        double total = weights.sum();
        if (total <= 0.0) break;
        weights /= total;
        weights = weights.cwiseMax(1e-300);
    }
    if (iters_out) *iters_out = it;
    return best;
}

inline double directed_gap_on_grid(const FactorGrid& g1, const FactorGrid& g2,
                                   const std::vector<double>& omegas, const GapOptions& opts,
                                   GapDiagnostics* diag) {
    double prev = std::numeric_limits<double>::infinity();
    double best = prev;
    int total_iters = 0;
    int order_used = 0;
    for (int order : opts.q_orders) {
        Eigen::MatrixXcd psi = laguerre_basis(omegas, order, opts.laguerre_pole);
        int iters = 0;
        double v = lawson_directed_fit(g1, g2, psi, opts, &iters);
        total_iters += iters;
        best = std::min(best, v);
        order_used = order;
        if (std::isfinite(prev) && std::abs(prev - v) < opts.order_tol) break;
        prev = v;
    }
    if (diag) {
        diag->order_used = order_used;
        diag->lawson_iterations = total_iters;
        diag->bracket_width = opts.order_tol;
    }
    return std::min(best, 1.0);
}

}  // namespace detail

inline double directed_gap(const StateSpaceModel& m1, const StateSpaceModel& m2,
                           const GapOptions& opts = {}) {
    NormalizedCoprimeFactors f1 = nrcf(m1), f2 = nrcf(m2);
    FrequencyGrid grid = FrequencyGrid::log_space(opts.wmin, opts.wmax, opts.grid_points);
    auto g1 = detail::eval_factors(f1, grid.omegas);
    auto g2 = detail::eval_factors(f2, grid.omegas);
    return detail::directed_gap_on_grid(g1, g2, grid.omegas, opts, nullptr);
}

inline GapResult gap_metric(const StateSpaceModel& m1, const StateSpaceModel& m2,
                            const GapOptions& opts = {}) {
    NormalizedCoprimeFactors f1 = nrcf(m1), f2 = nrcf(m2);
    FrequencyGrid grid = FrequencyGrid::log_space(opts.wmin, opts.wmax, opts.grid_points);
    auto g1 = detail::eval_factors(f1, grid.omegas);
    auto g2 = detail::eval_factors(f2, grid.omegas);
    GapResult out;
    GapDiagnostics d12, d21;
    out.directed_12 = detail::directed_gap_on_grid(g1, g2, grid.omegas, opts, &d12);
    out.directed_21 = detail::directed_gap_on_grid(g2, g1, grid.omegas, opts, &d21);
    out.value = std::max(out.directed_12, out.directed_21);
    out.diagnostics.order_used = std::max(d12.order_used, d21.order_used);
    out.diagnostics.lawson_iterations = d12.lawson_iterations + d21.lawson_iterations;
    out.diagnostics.bracket_width = opts.order_tol;
    return out;
}

inline GapResult gap_metric(const RationalTransferFunction& p1, const RationalTransferFunction& p2,
                            const GapOptions& opts = {}) {
    return gap_metric(tf_to_ss(p1), tf_to_ss(p2), opts);
}

// ---------------------------------------------------------------------------
// Generalized stability margin b_{P,C}
// ---------------------------------------------------------------------------

struct BpcResult {
    double value = 0.0;
    bool stabilizing = false;
};

// b_{P,C} = 1 / || [P; 1] (1 - CP)^{-1} [-C 1] ||_inf. With P = np/dp and
// C = nc/dc the 2x2 matrix is rank one, so the largest singular value at jw is
// sqrt(|np|^2 + |dp|^2) sqrt(|nc|^2 + |dc|^2) / |dp dc - np nc|.
inline BpcResult bpc(const RationalTransferFunction& plant, const RationalTransferFunction& controller) {
    auto mul = [](const Poly& x, const Poly& y) {
        Poly out(x.size() + y.size() - 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
        return out;
    };
    Poly delta = mul(plant.den, controller.den);
    Poly cross = mul(plant.num, controller.num);
    if (cross.size() > delta.size()) delta.resize(cross.size(), 0.0);
    for (std::size_t i = 0; i < cross.size(); ++i) delta[i] -= cross[i];

    BpcResult out;
    double scale = 1.0;
    for (const auto& r : poly_roots(delta)) scale = std::max(scale, std::abs(r));
    for (const auto& r : poly_roots(delta)) {
        if (r.real() >= -1e-9 * scale) {
            out.stabilizing = false;
            out.value = 0.0;
            return out;
        }
    }
    out.stabilizing = true;

    auto sigma_max = [&](double w) {
        std::complex<double> s(0.0, w);
        std::complex<double> np = poly_eval(plant.num, s), dp = poly_eval(plant.den, s);
        std::complex<double> nc = poly_eval(controller.num, s), dc = poly_eval(controller.den, s);
        double numerator = std::sqrt((std::norm(np) + std::norm(dp)) * (std::norm(nc) + std::norm(dc)));
        return numerator / std::abs(dp * dc - np * nc);
    };

    double peak = sigma_max(0.0);
    std::size_t argmax = 0;
    FrequencyGrid grid = FrequencyGrid::log_space(1e-4, 1e4, 4000);
    for (std::size_t i = 0; i < grid.omegas.size(); ++i) {
        double v = sigma_max(grid.omegas[i]);
        if (v > peak) {
            peak = v;
            argmax = i + 1;
        }
    }
    if (argmax > 0) {
        std::size_t idx = argmax - 1;
        double lo = idx > 0 ? grid.omegas[idx - 1] : grid.omegas[idx] * 0.5;
        double hi = idx + 1 < grid.omegas.size() ? grid.omegas[idx + 1] : grid.omegas[idx] * 2.0;
        double a = std::log(lo), b = std::log(hi);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = sigma_max(std::exp(c)), fd = sigma_max(std::exp(d));
        for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = sigma_max(std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = sigma_max(std::exp(d));
            }
        }
        peak = std::max(peak, std::max(fc, fd));
    }
    out.value = 1.0 / peak;
    return out;
}

}  // namespace sysdist
