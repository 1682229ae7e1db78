#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "mixedbvp/barriers/types.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/geometry/domain.hpp"

namespace mixedbvp {

/// w = r^gamma phi(theta), phi = C1 e^{sigma1 theta} + C2 e^{sigma2 theta},
/// with C1 = -kappa sigma2 / sigma1, C2 = 1, and its cylindrical extension
/// w~ = w(x_{N-1}, x_N) + C_ext |x'|^2.
struct ConicalBarrierParams {
    double a = 1.0, big_a = 2.0;
    double gamma = 0.0;
    double kappa = 3.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    double c1 = 0.0, c2 = 1.0;
    double theta1 = std::numbers::pi;
    double c_ext = 1.0;
    /// Computed: sandwich constant of the extension and the cylinder radius.
    double c_sandwich = 1.0;
    double r0 = std::numeric_limits<double>::infinity();

    double phi(double t) const { return c1 * std::exp(sigma1 * t) + c2 * std::exp(sigma2 * t); }
    double dphi(double t) const { return c1 * sigma1 * std::exp(sigma1 * t) + c2 * sigma2 * std::exp(sigma2 * t); }
    double d2phi(double t) const {
        return c1 * sigma1 * sigma1 * std::exp(sigma1 * t) + c2 * sigma2 * sigma2 * std::exp(sigma2 * t);
    }
};

/// (A-a)^2 (1-gamma)^2 - 2 a gamma (A + (gamma - 1) a)
inline double conical_discriminant(double a, double big_a, double gamma) {
    const double d = big_a - a;
    return d * d * (1.0 - gamma) * (1.0 - gamma) - 2.0 * a * gamma * (big_a + (gamma - 1.0) * a);
}

/// Roots of (a/2) s^2 - (A-a)(1-gamma) s + gamma (A + a(gamma-1)) = 0, sigma1 >= sigma2.
/// The small root is taken from the product of the roots to avoid cancellation.
inline std::pair<double, double> conical_exponents(double a, double big_a, double gamma) {
    require(a > 0.0 && big_a >= a, ErrorCode::InvalidEllipticity, "need 0 < a <= A");
    const double disc = conical_discriminant(a, big_a, gamma);
    if (disc < 0.0) {
        // Smallest offending gamma in (0, gamma]: where the discriminant first turns negative.
        double lo = 0.0, hi = gamma;
        if (conical_discriminant(a, big_a, 0.0) < 0.0) hi = 0.0;
        for (int it = 0; it < 200 && hi > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            (conical_discriminant(a, big_a, mid) < 0.0 ? hi : lo) = mid;
        }
        fail(ErrorCode::ComplexRoots, "conical exponents are complex for gamma = " + std::to_string(gamma) +
                                          "; the discriminant turns negative at gamma = " + std::to_string(hi));
    }
    const double b = (big_a - a) * (1.0 - gamma);
    const double s1 = (b + std::sqrt(disc)) / a;
    const double prod = 2.0 * gamma * (big_a + (gamma - 1.0) * a) / a;
    const double s2 = s1 != 0.0 ? prod / s1 : (b - std::sqrt(disc)) / a;
    return {s1, s2};
}

/// Builds the barrier for a given gamma. C_ext is the |x'|^2 coefficient
/// of the extension; the sandwich constant and r0 are derived from it.
inline ConicalBarrierParams make_conical_params(double a, double big_a, double gamma, double kappa,
                                                double theta1 = std::numbers::pi, double c_ext = 1.0, int dim = 3) {
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    require(kappa > 2.0, ErrorCode::InvalidArgument, "kappa must exceed 2");
    require(theta1 > 0.0 && theta1 < 2.0 * std::numbers::pi, ErrorCode::InvalidArgument, "theta1 must lie in (0, 2 pi)");
    require(c_ext > 0.0, ErrorCode::InvalidArgument, "extension coefficient must be positive");
    ConicalBarrierParams p;
    p.a = a;
    p.big_a = big_a;
    p.gamma = gamma;
    p.kappa = kappa;
    std::tie(p.sigma1, p.sigma2) = conical_exponents(a, big_a, gamma);
    p.c1 = p.sigma1 > 0.0 ? -kappa * p.sigma2 / p.sigma1 : 0.0;
    p.c2 = 1.0;
    p.theta1 = theta1;
    p.c_ext = c_ext;

    double phi_min = std::numeric_limits<double>::infinity(), phi_max = -phi_min;
    for (int k = 0; k <= 1000; ++k) {
        const double v = p.phi(theta1 * k / 1000.0);
        phi_min = std::min(phi_min, v);
        phi_max = std::max(phi_max, v);
    }
    p.c_sandwich = std::max({phi_max, phi_min > 0.0 ? 1.0 / phi_min : std::numeric_limits<double>::infinity(),
                             c_ext, 1.0 / c_ext});
    if (dim > 2) {
        p.r0 = std::pow(a * (kappa - 1.0) * p.sigma1 * p.sigma2 / (8.0 * c_ext * big_a * (dim - 2)),
                        1.0 / (2.0 - gamma));
    }
    return p;
}

/// The constraints choose_gamma enforces, evaluated for one parameter set
/// and a constant Neumann direction nu on {theta = 0}.
struct ConicalAdmissibility {
    bool real_exponents = false;
    bool smallness = false;      // kappa sigma2/sigma1 e^{8 pi (A-a)/a} <= 1/2
    bool phi_lower = false;      // phi >= 1/2 on [0, theta1]
    bool phi_decreasing = false; // phi' < 0
    bool phi_concave = false;    // phi'' < 0
    bool boundary = false;       // grad w . nu > 0 at theta = 0

    bool all() const { return real_exponents && smallness && phi_lower && phi_decreasing && phi_concave && boundary; }
};

inline ConicalAdmissibility conical_admissibility(const ConicalBarrierParams& p, const Vec& nu, int angle_samples = 1000) {
    ConicalAdmissibility c;
    c.real_exponents = p.sigma1 > p.sigma2 && p.sigma2 > 0.0;
    if (!c.real_exponents) return c;
    const double growth = std::exp(8.0 * std::numbers::pi * (p.big_a - p.a) / p.a);
    c.smallness = p.kappa * (p.sigma2 / p.sigma1) * growth <= 0.5;
    c.phi_lower = c.phi_decreasing = c.phi_concave = true;
    for (int k = 0; k <= angle_samples; ++k) {
        const double t = p.theta1 * k / angle_samples;
        c.phi_lower = c.phi_lower && p.phi(t) >= 0.5;
        c.phi_decreasing = c.phi_decreasing && p.dphi(t) < 0.0;
        c.phi_concave = c.phi_concave && p.d2phi(t) < 0.0;
    }
    c.boundary = p.gamma * p.phi(0.0) * nu[0] + p.dphi(0.0) * nu[1] > 0.0;
    return c;
}

/// Largest gamma = 2^{-k} gamma0 meeting every admissibility constraint.
inline ConicalBarrierParams choose_gamma(double a, double big_a, double kappa, const Vec& nu = Vec{0.0, -1.0},
                                         double theta1 = std::numbers::pi, double gamma0 = 0.5,
                                         double c_ext = 1.0) {
    require(a > 0.0 && big_a >= a, ErrorCode::InvalidEllipticity, "need 0 < a <= A");
    require(big_a > a, ErrorCode::DegenerateEllipticity,
            "a = A: the conical exponents are complex for every gamma > 0");
    require(nu[1] < 0.0, ErrorCode::InvalidArgument, "the Neumann direction needs nu_2 < 0");
    for (double g = gamma0; g >= 1e-14; g *= 0.5) {
        if (conical_discriminant(a, big_a, g) < 0.0) continue;
        const auto p = make_conical_params(a, big_a, g, kappa, theta1, c_ext);
        if (conical_admissibility(p, nu).all()) return p;
    }
    fail(ErrorCode::NoAdmissibleGamma, "no admissible gamma above 1e-14");
}

/// w = r^gamma phi(theta) at the point (x, y) with polar angle theta:
/// grad w = r^{gamma-2} (phi' X_perp + gamma phi X),
/// D^2 w = r^{gamma-4} {phi'' X_perp X_perp + (gamma-1) phi' (X_perp X + X X_perp)
///                     + gamma phi (r^2 I + (gamma-2) X X)}.
inline BarrierEval eval_conical_at(const ConicalBarrierParams& p, double x, double y, double theta) {
    const double r2 = x * x + y * y;
    const double r = std::sqrt(r2);
    const double f = p.phi(theta), f1 = p.dphi(theta), f2 = p.d2phi(theta);
    const Vec xv{x, y}, xp{-y, x};
    const double g = p.gamma;

    BarrierEval e;
    e.value = std::pow(r, g) * f;
    e.gradient = std::pow(r, g - 2.0) * (f1 * xp + (g * f) * xv);
    const SymMatrix h = f2 * SymMatrix::outer(xp) + ((g - 1.0) * f1) * SymMatrix::sym_outer(xp, xv) +
                        (g * f) * (r2 * SymMatrix::identity(2) + (g - 2.0) * SymMatrix::outer(xv));
    e.hessian = std::pow(r, g - 4.0) * h;
    return e;
}

inline BarrierEval eval_conical_barrier(const ConicalBarrierParams& p, double x, double y) {
    require(x * x + y * y > 0.0, ErrorCode::OriginSingularity, "the conical barrier is singular at the origin");
    const double theta = polar_angle(x, y);
    require(theta <= p.theta1 * (1.0 + 1e-14), ErrorCode::OutsideSector,
            "angle " + std::to_string(theta) + " lies outside [0, theta1]");
    return eval_conical_at(p, x, y, theta);
}

/// w~(x) = w(x_{N-1}, x_N) + C_ext |x'|^2 in dimension 3.
inline BarrierEval eval_cylindrical_barrier(const ConicalBarrierParams& p, const Vec& x) {
    require(x.dim() == 3, ErrorCode::InvalidArgument, "the cylindrical barrier is three-dimensional");
    const double r = std::hypot(x[1], x[2]);
    require(r > 0.0, ErrorCode::AxisSingularity, "the cylindrical barrier is singular on the axis r = 0");
    const BarrierEval w = eval_conical_barrier(p, x[1], x[2]);
    BarrierEval e;
    const double xp2 = x[0] * x[0];
    e.value = w.value + p.c_ext * xp2;
    e.gradient = Vec{2.0 * p.c_ext * x[0], w.gradient[0], w.gradient[1]};
    SymMatrix h(3);
    h.set(0, 0, 2.0 * p.c_ext);
    h.set(1, 1, w.hessian(0, 0));
    h.set(1, 2, w.hessian(0, 1));
    h.set(2, 2, w.hessian(1, 1));
    e.hessian = h;
    const double base = std::pow(r, p.gamma) + xp2;
    const double tol = 1e-12 * base;
    e.sandwich_holds = base / p.c_sandwich <= e.value + tol && e.value <= p.c_sandwich * base + tol;
    return e;
}

} // namespace mixedbvp
