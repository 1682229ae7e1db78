#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "mixedbvp/barriers/conical.hpp"
#include "mixedbvp/barriers/log_barrier.hpp"
#include "mixedbvp/barriers/types.hpp"
#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/geometry/domain.hpp"

namespace mixedbvp {

struct CertificateOptions {
    int r_count = 100;
    int theta_count = 100;
    double r_min = 1e-3;
    double r_max = 1.0;
    /// Nonzero seeds jitter the log-uniform grid inside each cell.
    std::uint64_t seed = 0;
};

namespace detail {

/// F(x, p, M) for the supersolution check: exact for Pucci kinds, the
/// upper Pucci bound otherwise.
inline long double super_f(const OperatorSpec& op, const Vec& x, const Vec& p, const SymMatrix& m) {
    return op.is_pucci() ? static_cast<long double>(op(x, p, m)) : static_cast<long double>(op.upper_bound(m));
}

struct MarginTracker {
    long double min = std::numeric_limits<long double>::infinity();
    Vec at;
    void add(long double v, const Vec& x) {
        if (v < min) {
            min = v;
            at = x;
        }
    }
};

inline std::vector<double> log_grid(double lo, double hi, int count, std::mt19937_64* rng) {
    std::vector<double> out(count);
    const double l0 = std::log(lo), l1 = std::log(hi);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        if (rng && i > 0 && i + 1 < count) t += (u(*rng) - 0.5) / (count - 1);
        out[i] = std::exp(l0 + (l1 - l0) * t);
    }
    return out;
}

inline void finish(BarrierCertificate& c, const MarginTracker& in, const MarginTracker& bd, double value_margin,
                   const Vec& value_at) {
    c.min_margin_interior = static_cast<double>(in.min);
    c.min_margin_boundary = static_cast<double>(bd.min);
    c.min_margin_value = value_margin;
    c.passed = in.min > 0 && bd.min > 0 && value_margin >= 0.0;
    if (!c.passed) {
        if (in.min <= 0) {
            c.witness = in.at;
            c.witness_kind = "interior";
        } else if (bd.min <= 0) {
            c.witness = bd.at;
            c.witness_kind = "boundary";
        } else {
            c.witness = value_at;
            c.witness_kind = "value";
        }
    }
}

} // namespace detail

/// Samples -|grad w|^alpha F(x, grad w, D^2 w) / r^{gamma-2+(gamma-1)alpha} on a
/// log-uniform (r, theta) grid, (grad w . nu) / r^{gamma-1} on {theta = 0},
/// and phi - 1/2 on [0, theta1].
inline BarrierCertificate verify_supersolution(const ConicalBarrierParams& p, const OperatorSpec& op,
                                               const Vec& nu = Vec{0.0, -1.0}, const CertificateOptions& opts = {}) {
    check_operator_constants(op);
    std::mt19937_64 rng(opts.seed);
    auto* jitter = opts.seed ? &rng : nullptr;
    const auto rs = detail::log_grid(opts.r_min, opts.r_max, opts.r_count, jitter);
    const double alpha = op.alpha, g = p.gamma;
    detail::MarginTracker in, bd;
    BarrierCertificate c;
    c.barrier = "conical";
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (double r : rs) {
        for (int j = 0; j < opts.theta_count; ++j) {
            double t = p.theta1 * j / (opts.theta_count - 1);
            if (jitter && j > 0 && j + 1 < opts.theta_count) t += p.theta1 * u(rng) / (opts.theta_count - 1);
            require(r > 0.0, ErrorCode::NonClassicalSample, "sample hit the origin");
            const Vec x{r * std::cos(t), r * std::sin(t)};
            const BarrierEval e = eval_conical_at(p, x[0], x[1], t);
            const long double grad = std::sqrt(static_cast<long double>(dot(e.gradient, e.gradient)));
            const long double lhs = -std::pow(grad, static_cast<long double>(alpha)) * detail::super_f(op, x, e.gradient, e.hessian);
            const long double scale = std::pow(static_cast<long double>(r), static_cast<long double>(g - 2.0 + (g - 1.0) * alpha));
            in.add(lhs / scale, x);
            ++c.sample_count;
        }
        const BarrierEval e0 = eval_conical_barrier(p, r, 0.0);
        const long double dn = static_cast<long double>(e0.gradient[0]) * nu[0] + static_cast<long double>(e0.gradient[1]) * nu[1];
        bd.add(dn / std::pow(static_cast<long double>(r), static_cast<long double>(g - 1.0)), Vec{r, 0.0});
    }
    double vmin = std::numeric_limits<double>::infinity();
    Vec vat{1.0, 0.0};
    for (int k = 0; k <= 1000; ++k) {
        const double t = p.theta1 * k / 1000.0;
        const double v = p.phi(t) - 0.5;
        if (v < vmin) {
            vmin = v;
            vat = Vec{std::cos(t), std::sin(t)};
        }
    }
    detail::finish(c, in, bd, vmin, vat);
    return c;
}

/// The same checks for the three-dimensional extension on the cylinder
/// {|x'| < r0} x {r < r0}, with margins normalized by the same powers of r.
inline BarrierCertificate verify_supersolution_cylindrical(const ConicalBarrierParams& p, const OperatorSpec& op,
                                                           const Vec& nu = Vec{0.0, 0.0, -1.0},
                                                           const CertificateOptions& opts = {}) {
    check_operator_constants(op);
    require(std::isfinite(p.r0), ErrorCode::InvalidArgument, "cylinder radius r0 is not set");
    std::mt19937_64 rng(opts.seed);
    const auto rs = detail::log_grid(opts.r_min * p.r0, p.r0 * (1.0 - 1e-12), opts.r_count, nullptr);
    const double alpha = op.alpha, g = p.gamma;
    detail::MarginTracker in, bd;
    BarrierCertificate c;
    c.barrier = "cylindrical";
    const int xp_count = 5;
    bool sandwich = true;
    for (double r : rs) {
        for (int j = 0; j < opts.theta_count; ++j) {
            const double t = std::min(p.theta1 * j / (opts.theta_count - 1), p.theta1);
            for (int k = 0; k < xp_count; ++k) {
                const double xp = p.r0 * (2.0 * k / (xp_count - 1) - 1.0) * (1.0 - 1e-12);
                const Vec x{xp, r * std::cos(t), r * std::sin(t)};
                const BarrierEval e = eval_cylindrical_barrier(p, x);
                sandwich = sandwich && e.sandwich_holds;
                const long double grad = std::sqrt(static_cast<long double>(dot(e.gradient, e.gradient)));
                const long double lhs =
                    -std::pow(grad, static_cast<long double>(alpha)) * detail::super_f(op, x, e.gradient, e.hessian);
                const long double scale =
                    std::pow(static_cast<long double>(r), static_cast<long double>(g - 2.0 + (g - 1.0) * alpha));
                in.add(lhs / scale, x);
                ++c.sample_count;
            }
        }
        for (int k = 0; k < xp_count; ++k) {
            const double xp = p.r0 * (2.0 * k / (xp_count - 1) - 1.0) * (1.0 - 1e-12);
            const BarrierEval e0 = eval_cylindrical_barrier(p, Vec{xp, r, 0.0});
            long double dn = 0;
            for (int i = 0; i < 3; ++i) dn += static_cast<long double>(e0.gradient[i]) * nu[i];
            bd.add(dn / std::pow(static_cast<long double>(r), static_cast<long double>(g - 1.0)), Vec{xp, r, 0.0});
        }
    }
    double vmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 1000; ++k) vmin = std::min(vmin, p.phi(p.theta1 * k / 1000.0) - 0.5);
    detail::finish(c, in, bd, sandwich ? vmin : -1.0, Vec{0.0, 1.0, 0.0});
    return c;
}

/// Per-region verification of the log barrier:
/// -|grad v|^alpha F(x, grad v, D^2 v) + beta(v) - sup f.
struct LogBarrierCertificate {
    int samples_per_region = 0;
    double min_margin_below = 0.0;   // {C d < kappa}
    double min_margin_above = 0.0;   // {C d > kappa}
    double min_margin_constant = 0.0; // where T_M(v_z) = M: beta(M) - sup f
    /// Closed-form gradient bounds (1/2) C/(1+Cd) <= |grad v| <= 2 C/(1+Cd) on {C d < kappa}.
    bool gradient_bounds_hold = true;
    bool passed = false;
    std::optional<Vec> witness;
};

inline LogBarrierCertificate verify_log_barrier(const LogBarrierParams& p, const DomainSpec& domain,
                                                const OperatorSpec& op, const Beta& beta, int samples_per_region = 10000,
                                                std::uint64_t seed = 0) {
    check_operator_constants(op);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = domain.dim();
    LogBarrierCertificate c;
    c.samples_per_region = samples_per_region;
    detail::MarginTracker below, above;
    int n_below = 0, n_above = 0;
    const long double fsup = p.f_sup;
    for (long long tries = 0; (n_below < samples_per_region || n_above < samples_per_region); ++tries) {
        require(tries < 1000LL * samples_per_region, ErrorCode::PreconditionFailed,
                "the barrier patch does not meet both regions");
        Vec x = p.z;
        double rr = 0.0;
        do {
            Vec off(n);
            for (int i = 0; i < n; ++i) off[i] = p.r_z * u(rng);
            rr = norm(off);
            x = p.z + off;
        } while (rr >= p.r_z);
        if (!domain.contains_exact(x)) continue;
        const auto info = distance_and_normal(domain, x);
        if (info.non_smooth || info.d <= 0.0) continue;
        const double cd = p.c_big * info.d;
        if (std::abs(cd - p.kappa) <= 1e-9 * p.kappa) continue;
        const bool is_below = cd < p.kappa;
        if (is_below && n_below >= samples_per_region) continue;
        if (!is_below && n_above >= samples_per_region) continue;
        const BarrierEval e = eval_log_barrier(p, domain, x);
        const long double grad = std::sqrt(static_cast<long double>(dot(e.gradient, e.gradient)));
        const long double margin = -std::pow(grad, static_cast<long double>(op.alpha)) *
                                       detail::super_f(op, x, e.gradient, e.hessian) +
                                   beta(e.value) - fsup;
        if (is_below) {
            below.add(margin, x);
            ++n_below;
            const double s = p.c_big / (1.0 + cd);
            const double gn = norm(e.gradient);
            if (gn < 0.5 * s * (1.0 - 1e-12) || gn > 2.0 * s * (1.0 + 1e-12)) c.gradient_bounds_hold = false;
        } else {
            above.add(margin, x);
            ++n_above;
        }
    }
    c.min_margin_below = static_cast<double>(below.min);
    c.min_margin_above = static_cast<double>(above.min);
    c.min_margin_constant = beta(p.m_big) - p.f_sup;
    c.passed = below.min >= 0 && above.min >= 0 && c.min_margin_constant >= 0.0;
    if (!c.passed) c.witness = below.min < 0 ? below.at : above.at;
    return c;
}

} // namespace mixedbvp
