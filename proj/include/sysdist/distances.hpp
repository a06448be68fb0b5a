#pragma once

// The two distance measures between stochastic LTI systems and their published
// bounds: the frequency-domain chordal-metric Wasserstein distance (worst case
// over a frequency grid) and the time-domain gap-metric-induced type-q
// Wasserstein distance, plus the comparison inequality between them.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sysdist/gap.hpp"
#include "sysdist/lti.hpp"
#include "sysdist/sphere.hpp"
#include "sysdist/transport.hpp"

namespace sysdist {

// ---------------------------------------------------------------------------
// Frequency-domain ensemble data
// ---------------------------------------------------------------------------

struct FrequencyEnsemble {
    FrequencyGrid grid;
    // samples[m][i] is the i-th complex response sample at grid.omegas[m].
    std::vector<std::vector<std::complex<double>>> samples;
    // Nominal response per frequency; empty when no nominal model is attached.
    std::vector<std::complex<double>> nominal;

    bool has_nominal() const { return !nominal.empty(); }

    std::size_t sample_count() const { return samples.empty() ? 0 : samples.front().size(); }

    void validate() const {
        grid.validate();
        if (samples.size() != grid.omegas.size())
            throw std::invalid_argument("one sample list per grid frequency required");
        std::size_t n = sample_count();
        if (n == 0) throw std::invalid_argument("ensemble needs at least one sample");
        for (const auto& at_omega : samples)
            if (at_omega.size() != n)
                throw std::invalid_argument("sample count must match at every frequency");
        if (!nominal.empty() && nominal.size() != grid.omegas.size())
            throw std::invalid_argument("nominal response must cover the whole grid");
    }
};

inline void require_matching_grids(const FrequencyEnsemble& a, const FrequencyEnsemble& b) {
    if (a.grid.omegas != b.grid.omegas)
        throw std::invalid_argument("frequency grids do not match");
}

// Samples at different frequencies are drawn independently; this is the
// frequency-data pipeline of the frequency-domain experiments.
inline FrequencyEnsemble perturb_frequency_ensemble(const RationalTransferFunction& nominal,
                                                    const FrequencyGrid& grid, int count,
                                                    double rho, std::uint64_t seed) {
    nominal.validate();
    grid.validate();
    if (count < 1) throw std::invalid_argument("ensemble size must be >= 1");
    if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
    FrequencyEnsemble fe;
    fe.grid = grid;
    fe.samples.resize(grid.omegas.size());
    fe.nominal.resize(grid.omegas.size());
    GaussianStream stream(seed);
    for (std::size_t m = 0; m < grid.omegas.size(); ++m) {
        std::complex<double> p = frequency_response(nominal, grid.omegas[m]);
        fe.nominal[m] = p;
        double sigma = rho * std::abs(p);
        fe.samples[m].reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            double re = stream.next(), im = stream.next();
            fe.samples[m].push_back(p + std::complex<double>(sigma * re, sigma * im));
        }
    }
    return fe;
}

// The whole-system pipeline of the comparison theorem: frequency samples are
// derived from sampled models, so they are correlated correctly across omega.
inline FrequencyEnsemble ensemble_to_frequency(const SystemEnsemble& ensemble,
                                               const FrequencyGrid& grid) {
    grid.validate();
    FrequencyEnsemble fe;
    fe.grid = grid;
    fe.samples.resize(grid.omegas.size());
    fe.nominal.resize(grid.omegas.size());
    StateSpaceModel nominal = ensemble.nominal();
    for (std::size_t m = 0; m < grid.omegas.size(); ++m) {
        double w = grid.omegas[m];
        fe.nominal[m] = frequency_response(nominal, w);
        fe.samples[m].reserve(ensemble.samples.size());
        for (const auto& [theta, model] : ensemble.samples)
            fe.samples[m].push_back(frequency_response(model, w));
    }
    return fe;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct BoundDetails {
    std::vector<double> c_curve;   // per-omega worst-case chordal cost C(omega)
    std::vector<double> lb_curve;  // per-omega nominal-deviation lower bound
    double diameter = 0.0;         // time domain: max pairwise gap
    double nominal_gap = 0.0;
    double mean_gap_1 = 0.0;       // E[gap(nominal_i, sample_i)] per ensemble
    double mean_gap_2 = 0.0;
    double lipschitz_1 = 0.0;      // moment-bound constants (estimates unless supplied)
    double lipschitz_2 = 0.0;
    double moment_1 = 0.0;         // E[|theta_i - nominal_theta_i|^q]^(1/q)
    double moment_2 = 0.0;
    double moment_bound_raw = 0.0;
    double moment_bound_clamped = 0.0;
    bool has_moment_bound = false;
};

struct DistanceReport {
    double value = 0.0;
    std::vector<std::pair<double, double>> per_frequency;  // (omega, W_q^q); frequency domain only
    double argmax_omega = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    BoundDetails bound_details;
    double q = 1.0;
    std::uint64_t seed = 0;
    bool sandwich_ok = false;
    double elapsed_seconds = 0.0;

    void check_sandwich(double tol = 1e-9) {
        sandwich_ok = (lower_bound <= value + tol) && (value <= upper_bound + tol);
        if (!sandwich_ok)
            throw std::runtime_error("bound sandwich violated: lb=" + std::to_string(lower_bound) +
                                     " value=" + std::to_string(value) +
                                     " ub=" + std::to_string(upper_bound));
    }
};

// ---------------------------------------------------------------------------
// Frequency-domain distance and bounds
// ---------------------------------------------------------------------------

inline EmpiricalMeasure<SpherePoint> project_ensemble(const FrequencyEnsemble& fe,
                                                      std::size_t omega_index) {
    if (omega_index >= fe.samples.size()) throw std::out_of_range("omega index out of range");
    std::vector<SpherePoint> atoms;
    atoms.reserve(fe.samples[omega_index].size());
    for (const auto& c : fe.samples[omega_index]) atoms.push_back(inverse_stereo(c));
    return EmpiricalMeasure<SpherePoint>::uniform(std::move(atoms));
}

inline double support_distance_complex(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2) {
    fe1.validate();
    fe2.validate();
    require_matching_grids(fe1, fe2);
    double best = 0.0;
    for (std::size_t m = 0; m < fe1.samples.size(); ++m)
        for (const auto& s1 : fe1.samples[m])
            for (const auto& s2 : fe2.samples[m]) best = std::max(best, std::abs(s1 - s2));
    return best;
}

namespace detail {

inline double worst_chordal_at(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2,
                               std::size_t m) {
    double best = 0.0;
    for (const auto& s1 : fe1.samples[m]) {
        SpherePoint r1 = inverse_stereo(s1);
        for (const auto& s2 : fe2.samples[m])
            best = std::max(best, chordal_distance(r1, inverse_stereo(s2)));
    }
    return best;
}

inline double lower_bound_at(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2,
                             std::size_t m, double q) {
    SpherePoint rb1 = inverse_stereo(fe1.nominal[m]);
    SpherePoint rb2 = inverse_stereo(fe2.nominal[m]);
    double d_bar = chordal_distance(rb1, rb2);
    auto mu = project_ensemble(fe1, m);
    auto nu = project_ensemble(fe2, m);
    CostMatrix dev;
    dev.kind = CostKind::Custom;
    dev.q = 1.0;
    dev.entries.resize(static_cast<Eigen::Index>(mu.atoms.size()),
                       static_cast<Eigen::Index>(nu.atoms.size()));
    for (Eigen::Index i = 0; i < dev.entries.rows(); ++i)
        for (Eigen::Index k = 0; k < dev.entries.cols(); ++k)
            dev.entries(i, k) = chordal_distance(mu.atoms[static_cast<std::size_t>(i)], rb1) +
                                chordal_distance(nu.atoms[static_cast<std::size_t>(k)], rb2);
    double worst_dev = max_cost_coupling(mu, nu, dev).second;
    return std::pow(std::max(d_bar - worst_dev, 0.0), q);
}

}  // namespace detail

inline double support_distance_sphere(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2) {
    fe1.validate();
    fe2.validate();
    require_matching_grids(fe1, fe2);
    double best = 0.0;
    for (std::size_t m = 0; m < fe1.samples.size(); ++m)
        best = std::max(best, detail::worst_chordal_at(fe1, fe2, m));
    return best;
}

inline double freq_upper_bound(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2,
                               double q) {
    fe1.validate();
    fe2.validate();
    require_matching_grids(fe1, fe2);
    if (q < 1.0) throw std::invalid_argument("q must be >= 1");
    double best = 0.0;
    for (std::size_t m = 0; m < fe1.samples.size(); ++m)
        best = std::max(best, std::pow(detail::worst_chordal_at(fe1, fe2, m), q));
    return best;
}

inline double freq_lower_bound(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2,
                               double q) {
    fe1.validate();
    fe2.validate();
    require_matching_grids(fe1, fe2);
    if (!fe1.has_nominal() || !fe2.has_nominal())
        throw std::invalid_argument("lower bound requires nominal responses in both ensembles");
    if (q < 1.0) throw std::invalid_argument("q must be >= 1");
    double best = 0.0;
    for (std::size_t m = 0; m < fe1.samples.size(); ++m)
        best = std::max(best, detail::lower_bound_at(fe1, fe2, m, q));
    return best;
}

inline DistanceReport freq_distance(const FrequencyEnsemble& fe1, const FrequencyEnsemble& fe2,
                                    double q) {
    auto t0 = std::chrono::steady_clock::now();
    fe1.validate();
    fe2.validate();
    require_matching_grids(fe1, fe2);
    if (q < 1.0) throw std::invalid_argument("q must be >= 1");

    DistanceReport report;
    report.q = q;
    report.per_frequency.reserve(fe1.grid.omegas.size());
    report.bound_details.c_curve.reserve(fe1.grid.omegas.size());
    bool with_nominal = fe1.has_nominal() && fe2.has_nominal();
    if (with_nominal) report.bound_details.lb_curve.reserve(fe1.grid.omegas.size());

    double best = -1.0;
    for (std::size_t m = 0; m < fe1.grid.omegas.size(); ++m) {
        auto mu = project_ensemble(fe1, m);
        auto nu = project_ensemble(fe2, m);
        double wqq = wasserstein_q(
            mu, nu, [](const SpherePoint& a, const SpherePoint& b) { return chordal_distance(a, b); },
            q);
        report.per_frequency.emplace_back(fe1.grid.omegas[m], wqq);
        report.bound_details.c_curve.push_back(detail::worst_chordal_at(fe1, fe2, m));
        if (with_nominal)
            report.bound_details.lb_curve.push_back(detail::lower_bound_at(fe1, fe2, m, q));
        if (wqq > best) {
            best = wqq;
            report.argmax_omega = fe1.grid.omegas[m];
        }
    }
    report.value = best;
    report.upper_bound = 0.0;
    for (double c : report.bound_details.c_curve)
        report.upper_bound = std::max(report.upper_bound, std::pow(c, q));
    report.lower_bound = 0.0;
    for (double lb : report.bound_details.lb_curve) report.lower_bound = std::max(report.lower_bound, lb);
    report.check_sandwich();
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Time-domain distance and bounds
// ---------------------------------------------------------------------------

// Shared computation for one ensemble pair: each model's normalized coprime
// factors are evaluated on the gap grid once; every gap after that is two
// directed Lawson solves. The N x N cross-gap matrix feeds the distance, the
// diameter bound, and diagnostics.
class EnsemblePairAnalysis {
public:
    EnsemblePairAnalysis(const SystemEnsemble& e1, const SystemEnsemble& e2,
                         GapOptions opts = GapOptions::fast())
        : e1_(e1), e2_(e2), opts_(std::move(opts)) {
        if (e1_.samples.empty() || e2_.samples.empty())
            throw std::invalid_argument("ensembles must be non-empty");
        grid_ = FrequencyGrid::log_space(opts_.wmin, opts_.wmax, opts_.grid_points);
        grids1_ = factor_grids(e1_, "ensemble 1");
        grids2_ = factor_grids(e2_, "ensemble 2");
        nominal_grid1_ = factor_grid_of(e1_.nominal(), "ensemble 1 nominal");
        nominal_grid2_ = factor_grid_of(e2_.nominal(), "ensemble 2 nominal");
    }

    const Eigen::MatrixXd& cross_gaps() {
        if (cross_.size() == 0) {
            const auto n1 = static_cast<Eigen::Index>(grids1_.size());
            const auto n2 = static_cast<Eigen::Index>(grids2_.size());
            cross_.resize(n1, n2);
            for (Eigen::Index i = 0; i < n1; ++i)
                for (Eigen::Index k = 0; k < n2; ++k)
                    cross_(i, k) = gap_between(grids1_[static_cast<std::size_t>(i)],
                                               grids2_[static_cast<std::size_t>(k)],
                                               "pair (" + std::to_string(i) + "," + std::to_string(k) + ")");
        }
        return cross_;
    }

    double nominal_gap() {
        if (!nominal_gap_)
            nominal_gap_ = gap_between(nominal_grid1_, nominal_grid2_, "nominal pair");
        return *nominal_gap_;
    }

    // Sample mean of gap(nominal_i, sample_i) for ensemble i in {1, 2}.
    double mean_nominal_deviation_gap(int which) {
        auto& cache = which == 1 ? dev1_ : dev2_;
        if (!cache) {
            const auto& grids = which == 1 ? grids1_ : grids2_;
            const auto& ng = which == 1 ? nominal_grid1_ : nominal_grid2_;
            double sum = 0.0;
            for (std::size_t i = 0; i < grids.size(); ++i)
                sum += gap_between(ng, grids[i],
                                   "nominal deviation " + std::to_string(which) + " sample " +
                                       std::to_string(i));
            cache = sum / static_cast<double>(grids.size());
        }
        return *cache;
    }

    // Empirical Lipschitz estimate: max over sampled pairs within ensemble i of
    // gap(model(theta), model(theta')) / |theta - theta'|.
    double lipschitz_estimate(int which) {
        auto& cache = which == 1 ? lip1_ : lip2_;
        if (!cache) {
            const auto& grids = which == 1 ? grids1_ : grids2_;
            const auto& ens = which == 1 ? e1_ : e2_;
            double best = 0.0;
            for (std::size_t i = 0; i < grids.size(); ++i)
                for (std::size_t j = i + 1; j < grids.size(); ++j) {
                    double dtheta = (ens.samples[i].first - ens.samples[j].first).norm();
                    if (dtheta < 1e-12) continue;
                    double g = gap_between(grids[i], grids[j],
                                           "lipschitz " + std::to_string(which) + " pair (" +
                                               std::to_string(i) + "," + std::to_string(j) + ")");
                    best = std::max(best, g / dtheta);
                }
            cache = best;
        }
        return *cache;
    }

    double distance(double q) {
        if (q < 1.0) throw std::invalid_argument("q must be >= 1");
        const Eigen::MatrixXd& gaps = cross_gaps();
        auto mu = uniform_measure(gaps.rows());
        auto nu = uniform_measure(gaps.cols());
        CostMatrix cost;
        cost.kind = CostKind::GapPow;
        cost.q = q;
        cost.entries = gaps.array().pow(q).matrix();
        return min_cost_coupling(mu, nu, cost).second;
    }

    double upper_bound_diameter(double q) { return std::pow(cross_gaps().maxCoeff(), q); }

    double lower_bound(double q) {
        double slack = nominal_gap() - mean_nominal_deviation_gap(1) - mean_nominal_deviation_gap(2);
        return std::pow(std::max(slack, 0.0), q);
    }

    double moment(int which, double q) {
        const auto& ens = which == 1 ? e1_ : e2_;
        double sum = 0.0;
        for (const auto& [theta, model] : ens.samples)
            sum += std::pow((theta - ens.family.nominal_theta).norm(), q);
        return std::pow(sum / static_cast<double>(ens.samples.size()), 1.0 / q);
    }

    double upper_bound_moment(double q, std::optional<double> L1 = std::nullopt,
                              std::optional<double> L2 = std::nullopt) {
        double l1 = L1 ? *L1 : lipschitz_estimate(1);
        double l2 = L2 ? *L2 : lipschitz_estimate(2);
        if (l1 < 0.0 || l2 < 0.0) throw std::invalid_argument("Lipschitz constants must be >= 0");
        return std::pow(nominal_gap() + l1 * moment(1, q) + l2 * moment(2, q), q);
    }

    DistanceReport report(double q, bool with_moment_bound = false,
                          std::optional<double> L1 = std::nullopt,
                          std::optional<double> L2 = std::nullopt) {
        auto t0 = std::chrono::steady_clock::now();
        DistanceReport r;
        r.q = q;
        r.seed = e1_.seed;
        r.value = distance(q);
        r.upper_bound = upper_bound_diameter(q);
        r.lower_bound = lower_bound(q);
        r.bound_details.diameter = cross_gaps().maxCoeff();
        r.bound_details.nominal_gap = nominal_gap();
        r.bound_details.mean_gap_1 = mean_nominal_deviation_gap(1);
        r.bound_details.mean_gap_2 = mean_nominal_deviation_gap(2);
        if (with_moment_bound) {
            r.bound_details.lipschitz_1 = L1 ? *L1 : lipschitz_estimate(1);
            r.bound_details.lipschitz_2 = L2 ? *L2 : lipschitz_estimate(2);
            r.bound_details.moment_1 = moment(1, q);
            r.bound_details.moment_2 = moment(2, q);
            r.bound_details.moment_bound_raw = upper_bound_moment(q, L1, L2);
            double base = std::min(std::pow(r.bound_details.moment_bound_raw, 1.0 / q), 1.0);
            r.bound_details.moment_bound_clamped = std::pow(base, q);
            r.bound_details.has_moment_bound = true;
        }
        r.check_sandwich();
        r.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

private:
    static EmpiricalMeasure<int> uniform_measure(Eigen::Index n) {
        std::vector<int> ids(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = static_cast<int>(i);
        return EmpiricalMeasure<int>::uniform(std::move(ids));
    }

    detail::FactorGrid factor_grid_of(const StateSpaceModel& model, const std::string& label) const {
        try {
            return detail::eval_factors(nrcf(model), grid_.omegas);
        } catch (const std::exception& e) {
            throw std::runtime_error("coprime factorization failed for " + label + ": " + e.what());
        }
    }

    std::vector<detail::FactorGrid> factor_grids(const SystemEnsemble& ens,
                                                 const std::string& label) const {
        std::vector<detail::FactorGrid> out;
        out.reserve(ens.samples.size());
        for (std::size_t i = 0; i < ens.samples.size(); ++i)
            out.push_back(factor_grid_of(ens.samples[i].second, label + " sample " + std::to_string(i)));
        return out;
    }

    double gap_between(const detail::FactorGrid& a, const detail::FactorGrid& b,
                       const std::string& label) const {
        try {
            double d12 = detail::directed_gap_on_grid(a, b, grid_.omegas, opts_, nullptr);
            double d21 = detail::directed_gap_on_grid(b, a, grid_.omegas, opts_, nullptr);
            return std::max(d12, d21);
        } catch (const std::exception& e) {
            throw std::runtime_error("gap computation failed for " + label + ": " + e.what());
        }
    }

    SystemEnsemble e1_, e2_;
    GapOptions opts_;
    FrequencyGrid grid_;
    std::vector<detail::FactorGrid> grids1_, grids2_;
    detail::FactorGrid nominal_grid1_, nominal_grid2_;
    Eigen::MatrixXd cross_;
    std::optional<double> nominal_gap_, dev1_, dev2_, lip1_, lip2_;
};

inline DistanceReport time_distance(const SystemEnsemble& e1, const SystemEnsemble& e2, double q,
                                    const GapOptions& opts = GapOptions::fast()) {
    EnsemblePairAnalysis analysis(e1, e2, opts);
    return analysis.report(q);
}

inline double nominal_distance(const SystemEnsemble& e1, const SystemEnsemble& e2,
                               const GapOptions& opts = GapOptions::fast()) {
    return gap_metric(e1.nominal(), e2.nominal(), opts).value;
}

inline double time_upper_bound_diameter(const SystemEnsemble& e1, const SystemEnsemble& e2, double q,
                                        const GapOptions& opts = GapOptions::fast()) {
    EnsemblePairAnalysis analysis(e1, e2, opts);
    return analysis.upper_bound_diameter(q);
}

inline double time_upper_bound_moment(const SystemEnsemble& e1, const SystemEnsemble& e2, double q,
                                      std::optional<double> L1 = std::nullopt,
                                      std::optional<double> L2 = std::nullopt,
                                      const GapOptions& opts = GapOptions::fast()) {
    EnsemblePairAnalysis analysis(e1, e2, opts);
    return analysis.upper_bound_moment(q, L1, L2);
}

inline double time_lower_bound(const SystemEnsemble& e1, const SystemEnsemble& e2, double q,
                               const GapOptions& opts = GapOptions::fast()) {
    EnsemblePairAnalysis analysis(e1, e2, opts);
    return analysis.lower_bound(q);
}

// ---------------------------------------------------------------------------
// Frequency-vs-time comparison (the inequality d_q <= dist^q)
// ---------------------------------------------------------------------------

struct ComparisonResult {
    double d_freq = 0.0;
    double d_time = 0.0;
    bool holds = false;
    double tolerance = 0.0;
    DistanceReport freq_report;
    DistanceReport time_report;
};

inline ComparisonResult comparison_check(const SystemEnsemble& e1, const SystemEnsemble& e2,
                                         const FrequencyGrid& grid, double q,
                                         const GapOptions& opts = GapOptions::fast(),
                                         double tol = 2e-3) {
    ComparisonResult out;
    FrequencyEnsemble fe1 = ensemble_to_frequency(e1, grid);
    FrequencyEnsemble fe2 = ensemble_to_frequency(e2, grid);
    out.freq_report = freq_distance(fe1, fe2, q);
    out.time_report = time_distance(e1, e2, q, opts);
    out.d_freq = out.freq_report.value;
    out.d_time = out.time_report.value;
    out.tolerance = tol;
    out.holds = out.d_freq <= out.d_time + tol;
    return out;
}

}  // namespace sysdist
