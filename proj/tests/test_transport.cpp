#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "sysdist/rng.hpp"
#include "sysdist/sphere.hpp"
#include "sysdist/transport.hpp"

namespace {

using namespace sysdist;

EmpiricalMeasure<int> uniform_ids(int n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    return EmpiricalMeasure<int>::uniform(std::move(ids));
}

// Exhaustive optimum over all permutation couplings (Birkhoff vertices) for
// uniform equal-count marginals.
std::pair<double, double> brute_force_extremes(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
        lo = std::min(lo, total);
        hi = std::max(hi, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {lo / n, hi / n};
}

CostMatrix as_cost(const Eigen::MatrixXd& entries) {
    CostMatrix c;
    c.entries = entries;
    return c;
}

TEST(MinCostCoupling, TrivialCases) {
    auto mu = uniform_ids(3);
    Eigen::MatrixXd zero_diag(3, 3);
    zero_diag << 0, 1, 2, 1, 0, 3, 2, 3, 0;
    auto [plan, value] = min_cost_coupling(mu, mu, as_cost(zero_diag));
    EXPECT_NEAR(value, 0.0, 1e-15);
    EXPECT_TRUE(plan.pi.isApprox(Eigen::MatrixXd::Identity(3, 3) / 3.0, 1e-12));

    auto single = uniform_ids(1);
    auto [p1, v1] = min_cost_coupling(single, single, as_cost(Eigen::MatrixXd::Constant(1, 1, 0.42)));
    EXPECT_DOUBLE_EQ(v1, 0.42);
}

TEST(MinCostCoupling, InvalidMarginalsThrow) {
    EmpiricalMeasure<int> bad;
    bad.atoms = {0, 1};
    bad.weights = (Eigen::VectorXd(2) << 0.6, 0.6).finished();
    auto mu = uniform_ids(2);
    EXPECT_THROW(min_cost_coupling(bad, mu, as_cost(Eigen::MatrixXd::Zero(2, 2))),
                 std::invalid_argument);
}

TEST(MinMaxCoupling, MatchesBruteForceOnUniformInstances) {
    Pcg32 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.next_u32() % 4);  // 2..5
        Eigen::MatrixXd cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = rng.next_double();
        auto [lo, hi] = brute_force_extremes(cost);
        auto mu = uniform_ids(n);
        EXPECT_NEAR(min_cost_coupling(mu, mu, as_cost(cost)).second, lo, 1e-9);
        EXPECT_NEAR(max_cost_coupling(mu, mu, as_cost(cost)).second, hi, 1e-9);
    }
}

// Exact oracle for non-uniform weights: rational weights expand into repeated
// atoms with uniform weights, where the assignment solver is the reference.
TEST(MinCostCoupling, GeneralWeightsMatchExpandedUniformOracle) {
    Pcg32 rng(32);
    for (int trial = 0; trial < 60; ++trial) {
        const int denom = 8;
        int m = 2 + static_cast<int>(rng.next_u32() % 2);
        int n = 2 + static_cast<int>(rng.next_u32() % 2);
        // Random compositions of `denom` into m and n positive parts.
        auto compose = [&](int parts) {
            std::vector<int> units(static_cast<std::size_t>(parts), 1);
            for (int left = denom - parts; left > 0; --left)
                units[rng.next_u32() % static_cast<std::uint32_t>(parts)] += 1;
            return units;
        };
        std::vector<int> wu = compose(m), wv = compose(n);
        Eigen::MatrixXd cost(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = rng.next_double();

        EmpiricalMeasure<int> mu, nu;
        mu.atoms.resize(static_cast<std::size_t>(m));
        nu.atoms.resize(static_cast<std::size_t>(n));
        mu.weights.resize(m);
        nu.weights.resize(n);
        for (int i = 0; i < m; ++i) mu.weights(i) = wu[static_cast<std::size_t>(i)] / double(denom);
        for (int j = 0; j < n; ++j) nu.weights(j) = wv[static_cast<std::size_t>(j)] / double(denom);
        double value = min_cost_coupling(mu, nu, as_cost(cost)).second;

        Eigen::MatrixXd expanded(denom, denom);
        std::vector<int> row_of, col_of;
        for (int i = 0; i < m; ++i)
            for (int r = 0; r < wu[static_cast<std::size_t>(i)]; ++r) row_of.push_back(i);
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < wv[static_cast<std::size_t>(j)]; ++r) col_of.push_back(j);
        for (int i = 0; i < denom; ++i)
            for (int j = 0; j < denom; ++j)
                expanded(i, j) = cost(row_of[static_cast<std::size_t>(i)], col_of[static_cast<std::size_t>(j)]);
        double oracle = min_cost_coupling(uniform_ids(denom), uniform_ids(denom), as_cost(expanded)).second;
        EXPECT_NEAR(value, oracle, 1e-8);
    }
}

TEST(CouplingPlan, MarginalsRespected) {
    Pcg32 rng(33);
    EmpiricalMeasure<int> mu, nu;
    mu.atoms = {0, 1, 2};
    nu.atoms = {0, 1};
    mu.weights = (Eigen::VectorXd(3) << 0.2, 0.5, 0.3).finished();
    nu.weights = (Eigen::VectorXd(2) << 0.6, 0.4).finished();
    Eigen::MatrixXd cost(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) cost(i, j) = rng.next_double();
    auto [plan, value] = min_cost_coupling(mu, nu, as_cost(cost));
    EXPECT_GE(plan.pi.minCoeff(), -1e-12);
    EXPECT_TRUE(plan.pi.rowwise().sum().isApprox(mu.weights, 1e-9));
    EXPECT_TRUE(plan.pi.colwise().sum().transpose().isApprox(nu.weights, 1e-9));
    EXPECT_LE(value, cost.maxCoeff() + 1e-12);
    EXPECT_GE(value, cost.minCoeff() - 1e-12);
}

TEST(MaxCostCoupling, TrivialCases) {
    auto single = uniform_ids(1);
    EXPECT_DOUBLE_EQ(max_cost_coupling(single, single, as_cost(Eigen::MatrixXd::Constant(1, 1, 0.3))).second,
                     0.3);
    auto mu = uniform_ids(3);
    EXPECT_NEAR(max_cost_coupling(mu, mu, as_cost(Eigen::MatrixXd::Constant(3, 3, 0.77))).second, 0.77,
                1e-12);
}

TEST(WassersteinQ, TrivialAndKnownValues) {
    std::vector<SpherePoint> pts = {inverse_stereo({0.0, 0.0}), inverse_stereo({1.0, 0.0}),
                                    inverse_stereo({0.0, 2.0})};
    auto mu = EmpiricalMeasure<SpherePoint>::uniform(pts);
    auto metric = [](const SpherePoint& a, const SpherePoint& b) { return chordal_distance(a, b); };
    EXPECT_NEAR(wasserstein_q(mu, mu, metric, 1.0), 0.0, 1e-12);

    auto s1 = EmpiricalMeasure<SpherePoint>::uniform({pts[0]});
    auto s2 = EmpiricalMeasure<SpherePoint>::uniform({pts[1]});
    double d = chordal_distance(pts[0], pts[1]);
    EXPECT_NEAR(wasserstein_q(s1, s2, metric, 2.0), d * d, 1e-12);

    EXPECT_THROW(wasserstein_q(mu, mu, metric, 0.5), std::invalid_argument);
}

TEST(WassersteinQ, SymmetryAndMonotonicityInQ) {
    GaussianStream stream(44);
    std::vector<SpherePoint> a, b;
    for (int i = 0; i < 5; ++i) {
        a.push_back(inverse_stereo({stream.next(), stream.next()}));
        b.push_back(inverse_stereo({stream.next(), stream.next()}));
    }
    auto mu = EmpiricalMeasure<SpherePoint>::uniform(a);
    auto nu = EmpiricalMeasure<SpherePoint>::uniform(b);
    auto metric = [](const SpherePoint& x, const SpherePoint& y) { return chordal_distance(x, y); };
    EXPECT_NEAR(wasserstein_q(mu, nu, metric, 1.0), wasserstein_q(nu, mu, metric, 1.0), 1e-10);
    double prev = wasserstein_q(mu, nu, metric, 1.0);
    for (double q : {1.5, 2.0, 3.0}) {
        double cur = wasserstein_q(mu, nu, metric, q);
        EXPECT_LE(cur, prev + 1e-12);  // chordal costs are <= 1
        prev = cur;
    }
}

}  // namespace
