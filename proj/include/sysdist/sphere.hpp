#pragma once

// The Riemann sphere used here has unit diameter, centred at (0, 0, 1/2),
// tangent to the complex plane at its south pole (the origin).

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace sysdist {

struct SpherePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double sphere_equation_residual(const SpherePoint& p) {
    return p.x * p.x + p.y * p.y + (p.z - 0.5) * (p.z - 0.5) - 0.25;
}

// Radial projection from the sphere centre back onto the surface; used when
// arithmetic has drifted a point off the sphere by more than 1e-10.
inline SpherePoint renormalize(const SpherePoint& p) {
    if (std::abs(sphere_equation_residual(p)) <= 1e-10) return p;
    double dx = p.x, dy = p.y, dz = p.z - 0.5;
    double n = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (n == 0.0) throw std::invalid_argument("cannot renormalize the sphere centre");
    double s = 0.5 / n;
    return {dx * s, dy * s, 0.5 + dz * s};
}

inline SpherePoint inverse_stereo(std::complex<double> c) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("inverse_stereo requires a finite complex number");
    double m2 = std::norm(c);
    double d = 1.0 + m2;
    return {c.real() / d, c.imag() / d, m2 / d};
}

inline std::complex<double> stereo(const SpherePoint& p) {
    if (p.z >= 1.0 - 1e-13)
        throw std::domain_error("stereo: north pole maps to the point at infinity");
    // For z near 1 the difference 1 - z loses precision; on the sphere
    // x^2 + y^2 = z(1 - z), which recovers it at full relative accuracy.
    double denom = p.z > 0.5 ? (p.x * p.x + p.y * p.y) / p.z : 1.0 - p.z;
    return {p.x / denom, p.y / denom};
}

// Straight-line distance through the sphere; in [0, 1], equals sin(geodesic).
inline double chordal_distance(const SpherePoint& r1, const SpherePoint& r2) {
    double dx = r1.x - r2.x, dy = r1.y - r2.y, dz = r1.z - r2.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Arc length along the sphere surface; in [0, pi/2] for the radius-1/2 sphere.
inline double geodesic_distance(const SpherePoint& r1, const SpherePoint& r2) {
    double inner = (r1.x) * (r2.x) + (r1.y) * (r2.y) + (r1.z - 0.5) * (r2.z - 0.5);
    // 4<u,v> is cos of the central angle; clamp against 1e-16 roundoff.
    double arg = std::clamp(4.0 * inner, -1.0, 1.0);
    return 0.5 * std::acos(arg);
}

// Density transformation factor (r + r^3)/2 for pushing an analytic density on
// the complex plane onto the sphere. The empirical pipeline does not use it.
inline double sphere_density_factor(std::complex<double> c) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("sphere_density_factor requires finite input");
    double r = std::abs(c);
    return 0.5 * (r + r * r * r);
}

}  // namespace sysdist
