#pragma once

// Pinned random number generation. Ensemble reproducibility across platforms
// requires a fully specified generator, so we use PCG32 (Melissa O'Neill's
// pcg32_oneseq constants) with Box-Muller for normal draws instead of the
// implementation-defined std::normal_distribution.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace sysdist {

class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed) : state_(0u) {
        state_ = increment_ + seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * multiplier_ + increment_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

private:
    static constexpr std::uint64_t multiplier_ = 6364136223846793005ULL;
    static constexpr std::uint64_t increment_ = 1442695040888963407ULL;
    std::uint64_t state_;
};

// Standard-normal stream via Box-Muller on the PCG32 uniforms.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = rng_.next_double();
        double u2 = rng_.next_double();
        while (u1 <= 0.0) u1 = rng_.next_double();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    Eigen::VectorXd next_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = next();
        return v;
    }

private:
    Pcg32 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Factor of a symmetric PSD covariance for sampling; eigendecomposition with
// negative eigenvalues clipped at zero, so degenerate covariances are allowed.
inline Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& covariance) {
    if (covariance.rows() != covariance.cols())
        throw std::invalid_argument("covariance must be square");
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-12) throw std::invalid_argument("covariance not PSD");
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace sysdist
