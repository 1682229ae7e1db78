#pragma once

// Central finite differences with a Richardson check: halving the step of a
// second-order difference should divide the error by four.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mixedbvp/core/linalg.hpp"

namespace fd {

struct Richardson {
    double err_h = 0.0;
    double err_h2 = 0.0;
    double ratio = 0.0;
    bool in_noise = false;
    bool ok = false;
};

/// `approx(step)` returns the difference quotient for a given step.
/// Errors below `noise` (roundoff level) are treated as exact agreement.
inline Richardson check(const std::function<double(double)>& approx, double exact, double h, double noise,
                        double lo = 3.5, double hi = 4.5) {
    Richardson r;
    r.err_h = std::abs(approx(h) - exact);
    r.err_h2 = std::abs(approx(0.5 * h) - exact);
    r.ratio = r.err_h2 > 0.0 ? r.err_h / r.err_h2 : std::numeric_limits<double>::infinity();
    if (r.err_h <= noise) {
        r.in_noise = true;
        r.ok = r.err_h2 <= 2.0 * noise;
        return r;
    }
    r.ok = r.ratio >= lo && r.ratio <= hi;
    return r;
}

/// Noise level of a central difference of values of size `scale` with step h.
inline double noise_floor(double scale, double h) {
    return 1e3 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300) / h;
}

inline mixedbvp::Vec unit(int dim, int i) {
    mixedbvp::Vec e(dim);
    e[i] = 1.0;
    return e;
}

/// Richardson check of d f / dx_i against `exact` at x.
inline Richardson gradient_component(const std::function<double(const mixedbvp::Vec&)>& f, const mixedbvp::Vec& x,
                                     int i, double exact, double h) {
    const mixedbvp::Vec e = unit(x.dim(), i);
    auto q = [&](double s) { return (f(x + s * e) - f(x - s * e)) / (2.0 * s); };
    const double scale = std::max({std::abs(f(x + h * e)), std::abs(f(x - h * e)), std::abs(f(x))});
    return check(q, exact, h, noise_floor(scale, 0.5 * h));
}

} // namespace fd
