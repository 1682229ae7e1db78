#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/pucci/pucci.hpp"

namespace mixedbvp {

enum class OperatorKind { PucciPlus, PucciMinus, Custom };

constexpr std::string_view to_string(OperatorKind k) {
    switch (k) {
    case OperatorKind::PucciPlus: return "pucci_plus";
    case OperatorKind::PucciMinus: return "pucci_minus";
    case OperatorKind::Custom: return "custom";
    }
    return "?";
}

/// F(x, p, M)
using OperatorFn = std::function<double(const Vec& x, const Vec& p, const SymMatrix& m)>;

/// A second-order operator F with its structure constants.
///
/// `a`/`big_a` are the ellipticity bounds, `alpha` the exponent of the
/// gradient factor |p|^alpha, `lip_p` the Lipschitz constant in p and
/// (`c_f`, `theta_f`) the Hoelder modulus in x. `homogeneous` declares
/// F(x, t p, t M) = t F(x, p, M) for t >= 0; it is never inferred.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::PucciPlus;
    double a = 1.0;
    double big_a = 1.0;
    double alpha = 0.0;
    double lip_p = 0.0;
    double c_f = 0.0;
    double theta_f = 0.75;
    bool homogeneous = true;
    OperatorFn custom;

    static OperatorSpec pucci_plus(double a, double big_a, double alpha = 0.0) {
        OperatorSpec s;
        s.kind = OperatorKind::PucciPlus;
        s.a = a;
        s.big_a = big_a;
        s.alpha = alpha;
        return s;
    }

    static OperatorSpec pucci_minus(double a, double big_a, double alpha = 0.0) {
        OperatorSpec s = pucci_plus(a, big_a, alpha);
        s.kind = OperatorKind::PucciMinus;
        return s;
    }

    static OperatorSpec make_custom(OperatorFn fn, double a, double big_a, double alpha = 0.0,
                                   double lip_p = 0.0, double c_f = 0.0, double theta_f = 0.75,
                                   bool homogeneous = false) {
        OperatorSpec s;
        s.kind = OperatorKind::Custom;
        s.custom = std::move(fn);
        s.a = a;
        s.big_a = big_a;
        s.alpha = alpha;
        s.lip_p = lip_p;
        s.c_f = c_f;
        s.theta_f = theta_f;
        s.homogeneous = homogeneous;
        return s;
    }

    bool is_pucci() const { return kind != OperatorKind::Custom; }

    double operator()(const Vec& x, const Vec& p, const SymMatrix& m) const {
        switch (kind) {
        case OperatorKind::PucciPlus: return mixedbvp::pucci_plus(a, big_a, m);
        case OperatorKind::PucciMinus: return mixedbvp::pucci_minus(a, big_a, m);
        case OperatorKind::Custom:
            require(static_cast<bool>(custom), ErrorCode::InvalidArgument,
                    "custom operator has no evaluation function");
            return custom(x, p, m);
        }
        return 0.0;
    }

    /// Upper Pucci bound used wherever F cannot be evaluated analytically.
    double upper_bound(const SymMatrix& m) const { return mixedbvp::pucci_plus(a, big_a, m); }
    double lower_bound(const SymMatrix& m) const { return mixedbvp::pucci_minus(a, big_a, m); }
};

/// Throws on the scalar invariants (ellipticity, alpha, theta_f).
inline void check_operator_constants(const OperatorSpec& op) {
    check_ellipticity(op.a, op.big_a);
    require(op.alpha > -1.0, ErrorCode::InvalidAlpha,
            "alpha must exceed -1, got " + std::to_string(op.alpha));
    require(op.lip_p >= 0.0, ErrorCode::InvalidArgument, "lip_p must be nonnegative");
    require(op.theta_f > 0.5 && op.theta_f < 1.0, ErrorCode::InvalidArgument,
            "theta_f must lie in (1/2, 1)");
}

} // namespace mixedbvp
