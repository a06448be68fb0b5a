#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "sysdist/rng.hpp"
#include "sysdist/sphere.hpp"

namespace {

using namespace sysdist;

TEST(InverseStereo, KnownPoints) {
    SpherePoint south = inverse_stereo({0.0, 0.0});
    EXPECT_DOUBLE_EQ(south.x, 0.0);
    EXPECT_DOUBLE_EQ(south.y, 0.0);
    EXPECT_DOUBLE_EQ(south.z, 0.0);

    SpherePoint one = inverse_stereo({1.0, 0.0});
    EXPECT_DOUBLE_EQ(one.x, 0.5);
    EXPECT_DOUBLE_EQ(one.y, 0.0);
    EXPECT_DOUBLE_EQ(one.z, 0.5);

    SpherePoint imag = inverse_stereo({0.0, 1.0});
    EXPECT_DOUBLE_EQ(imag.x, 0.0);
    EXPECT_DOUBLE_EQ(imag.y, 0.5);
    EXPECT_DOUBLE_EQ(imag.z, 0.5);
}

TEST(InverseStereo, RejectsNonFinite) {
    EXPECT_THROW(inverse_stereo({std::nan(""), 0.0}), std::invalid_argument);
    EXPECT_THROW(inverse_stereo({0.0, INFINITY}), std::invalid_argument);
}

TEST(InverseStereo, OutputOnSphere) {
    GaussianStream stream(1);
    for (int i = 0; i < 1000; ++i) {
        std::complex<double> c(10.0 * stream.next(), 10.0 * stream.next());
        EXPECT_LT(std::abs(sphere_equation_residual(inverse_stereo(c))), 1e-12);
    }
}

TEST(Stereo, KnownPoints) {
    EXPECT_EQ(stereo({0.0, 0.0, 0.0}), std::complex<double>(0.0, 0.0));
    EXPECT_EQ(stereo({0.5, 0.0, 0.5}), std::complex<double>(1.0, 0.0));
    EXPECT_THROW(stereo({0.0, 0.0, 1.0}), std::domain_error);
}

TEST(Stereo, RoundTrip) {
    // Magnitudes log-uniform up to 1e6 per the documented domain.
    Pcg32 rng(2);
    GaussianStream stream(3);
    for (int i = 0; i < 1000; ++i) {
        double mag = std::pow(10.0, 12.0 * rng.next_double() - 6.0);
        double phase = 2.0 * M_PI * rng.next_double();
        std::complex<double> c = mag * std::complex<double>(std::cos(phase), std::sin(phase));
        std::complex<double> back = stereo(inverse_stereo(c));
        EXPECT_LE(std::abs(back - c), 1e-12 * std::max(1.0, std::abs(c)));
    }
}

TEST(Renormalize, ProjectsDriftedPoints) {
    SpherePoint drifted{0.51, 0.0, 0.52};
    SpherePoint fixed = renormalize(drifted);
    EXPECT_LT(std::abs(sphere_equation_residual(fixed)), 1e-14);
    SpherePoint on = inverse_stereo({0.3, -0.2});
    SpherePoint same = renormalize(on);
    EXPECT_EQ(same.x, on.x);
    EXPECT_THROW(renormalize({0.0, 0.0, 0.5}), std::invalid_argument);
}

TEST(ChordalDistance, KnownValuesAndKappaIdentity) {
    SpherePoint south{0.0, 0.0, 0.0}, north{0.0, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(chordal_distance(south, south), 0.0);
    EXPECT_DOUBLE_EQ(chordal_distance(south, north), 1.0);

    GaussianStream stream(5);
    for (int i = 0; i < 1000; ++i) {
        std::complex<double> p1(3.0 * stream.next(), 3.0 * stream.next());
        std::complex<double> p2(3.0 * stream.next(), 3.0 * stream.next());
        double kappa = std::abs(p1 - p2) /
                       std::sqrt((1.0 + std::norm(p1)) * (1.0 + std::norm(p2)));
        EXPECT_NEAR(chordal_distance(inverse_stereo(p1), inverse_stereo(p2)), kappa, 1e-12);
    }
}

TEST(GeodesicDistance, KnownValuesAndSineRelation) {
    SpherePoint south{0.0, 0.0, 0.0}, north{0.0, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(geodesic_distance(south, south), 0.0);
    EXPECT_DOUBLE_EQ(geodesic_distance(south, north), M_PI / 2.0);

    GaussianStream stream(6);
    for (int i = 0; i < 1000; ++i) {
        SpherePoint r1 = inverse_stereo({2.0 * stream.next(), 2.0 * stream.next()});
        SpherePoint r2 = inverse_stereo({2.0 * stream.next(), 2.0 * stream.next()});
        double chord = chordal_distance(r1, r2);
        double geo = geodesic_distance(r1, r2);
        EXPECT_NEAR(chord, std::sin(geo), 1e-12);
        EXPECT_LE(chord, geo + 1e-12);
        EXPECT_GE(chord, 0.0);
        EXPECT_LE(chord, 1.0);
        EXPECT_GE(geo, 0.0);
        EXPECT_LE(geo, M_PI / 2.0 + 1e-12);
    }
}

TEST(ChordalDistance, MetricAxioms) {
    GaussianStream stream(7);
    for (int i = 0; i < 300; ++i) {
        SpherePoint a = inverse_stereo({stream.next(), stream.next()});
        SpherePoint b = inverse_stereo({stream.next(), stream.next()});
        SpherePoint c = inverse_stereo({stream.next(), stream.next()});
        EXPECT_DOUBLE_EQ(chordal_distance(a, b), chordal_distance(b, a));
        EXPECT_LT(chordal_distance(a, a), 1e-12);
        EXPECT_LE(chordal_distance(a, c), chordal_distance(a, b) + chordal_distance(b, c) + 1e-12);
    }
}

TEST(SphereDensityFactor, KnownValues) {
    EXPECT_DOUBLE_EQ(sphere_density_factor({0.0, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(sphere_density_factor({1.0, 0.0}), 1.0);
    EXPECT_DOUBLE_EQ(sphere_density_factor({2.0, 0.0}), 5.0);
    EXPECT_THROW(sphere_density_factor({INFINITY, 0.0}), std::invalid_argument);
}

}  // namespace
