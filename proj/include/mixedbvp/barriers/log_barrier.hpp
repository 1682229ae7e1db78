#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixedbvp/barriers/types.hpp"
#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/geometry/domain.hpp"

namespace mixedbvp {

/// Constants of the boundary log barrier
/// v_z = log(1 + C d) + M |x - z|^2 / r_z^2 on the patch B(z, r_z).
struct LogBarrierParams {
    int n = 2;
    double a = 1.0, big_a = 1.0, alpha = 0.0;
    double m_big = 2.0;
    double r_z = 0.5;
    double hess_d_bound = 0.0;
    double f_sup = 0.0;
    Vec z;
    double gamma = 0.0;
    double kappa = 0.0;
    double c_big = 0.0;

    /// 8N(A/a)(M/r_z + |D^2 d|) + (2^{1+|alpha|} f_sup / a)^{1/(2+alpha)}
    static double gamma_formula(int n, double a, double big_a, double alpha, double m_big, double r_z,
                                double hess_d_bound, double f_sup) {
        return 8.0 * n * (big_a / a) * (m_big / r_z + hess_d_bound) +
               std::pow(std::pow(2.0, 1.0 + std::abs(alpha)) / a * f_sup, 1.0 / (2.0 + alpha));
    }

    /// N A (2 Gamma)^{alpha^+ + 2}
    double kappa_threshold() const {
        return n * big_a * std::pow(2.0 * gamma, std::max(alpha, 0.0) + 2.0);
    }
};

/// Gamma, then the smallest kappa > 1 with beta(log(1 + kappa)) >= N A (2 Gamma)^{alpha^+ + 2}
/// (geometric bracketing refined by bisection), then C = (1 + kappa) Gamma.
inline LogBarrierParams log_barrier_constants(int n, double a, double big_a, double alpha, double m_big, double r_z,
                                              double hess_d_bound, double f_sup, const Beta& beta,
                                              const Vec& z = Vec{0.0, 0.0}) {
    check_dim(n);
    require(a > 0.0 && big_a >= a, ErrorCode::InvalidEllipticity, "need 0 < a <= A");
    require(alpha > -1.0, ErrorCode::InvalidAlpha, "alpha must exceed -1");
    require(m_big > 1.0, ErrorCode::InvalidArgument, "M must exceed 1");
    require(r_z > 0.0 && r_z <= 1.0, ErrorCode::InvalidArgument, "patch radius must lie in (0, 1]");
    require(f_sup >= 0.0 && hess_d_bound >= 0.0, ErrorCode::InvalidArgument, "bounds must be nonnegative");
    require(beta(m_big) >= f_sup, ErrorCode::PreconditionFailed, "beta(M) must dominate sup |f|");

    LogBarrierParams p;
    p.n = n;
    p.a = a;
    p.big_a = big_a;
    p.alpha = alpha;
    p.m_big = m_big;
    p.r_z = r_z;
    p.hess_d_bound = hess_d_bound;
    p.f_sup = f_sup;
    p.z = z;
    p.gamma = LogBarrierParams::gamma_formula(n, a, big_a, alpha, m_big, r_z, hess_d_bound, f_sup);
    const double threshold = p.kappa_threshold();
    require(std::isfinite(p.gamma) && std::isfinite(threshold), ErrorCode::Overflow,
            "kappa threshold overflows: exponent alpha^+ + 2 = " + std::to_string(std::max(alpha, 0.0) + 2.0));

    auto ok = [&](double k) { return beta(std::log1p(k)) >= threshold; };
    double hi = 2.0;
    while (!ok(hi)) {
        hi *= 2.0;
        require(std::isfinite(hi) && hi < 1e300, ErrorCode::KappaUnattainable,
                "beta(log(1 + kappa)) stays below " + std::to_string(threshold));
    }
    double lo = std::max(1.0, hi / 2.0);
    if (ok(lo)) hi = lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    p.kappa = std::max(hi, std::nextafter(1.0, 2.0));
    p.c_big = (1.0 + p.kappa) * p.gamma;
    require(std::isfinite(p.c_big), ErrorCode::Overflow, "C = (1 + kappa) Gamma overflows");
    return p;
}

/// Closed-form v_z and its derivatives at x in the patch.
inline BarrierEval eval_log_barrier(const LogBarrierParams& p, const DomainSpec& domain, const Vec& x) {
    const Vec rel = x - p.z;
    require(norm(rel) < p.r_z && domain.contains_exact(x), ErrorCode::OutsidePatch,
            "point lies outside the barrier patch");
    const int n = domain.dim();
    const auto info = distance_and_normal(domain, x);
    const double cd = p.c_big * info.d;
    const double quad = p.m_big / (p.r_z * p.r_z);

    BarrierEval e;
    e.value = quad * dot(rel, rel);
    e.gradient = 2.0 * quad * rel;
    e.hessian = 2.0 * quad * SymMatrix::identity(n);
    const double rel_gap = (cd - p.kappa) / p.kappa;
    if (std::abs(rel_gap) <= 1e-12) {
        e.region_tag = RegionTag::AtKappa;
        e.classical = false;
        e.value += std::log1p(p.kappa);
    } else if (cd > p.kappa) {
        e.region_tag = RegionTag::AboveKappa;
        e.value += std::log1p(p.kappa);
    } else {
        e.region_tag = RegionTag::BelowKappa;
        const double s = p.c_big / (1.0 + cd);
        e.value += std::log1p(cd);
        e.gradient += s * info.grad_d;
        e.hessian += s * distance_hessian(domain, x) - s * s * SymMatrix::outer(info.grad_d);
    }
    return e;
}

/// T_M(v_z) = min(v_z, M) on the patch, M elsewhere in the domain.
inline double truncate_and_extend(const LogBarrierParams& p, const DomainSpec& domain, const Vec& x) {
    if (norm(x - p.z) >= p.r_z || !domain.contains_exact(x)) return p.m_big;
    return std::min(eval_log_barrier(p, domain, x).value, p.m_big);
}

} // namespace mixedbvp
