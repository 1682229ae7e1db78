#pragma once

#include <string>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/pucci/eigen.hpp"

namespace mixedbvp {

inline void check_ellipticity(double a, double big_a) {
    require(a > 0.0 && big_a >= a, ErrorCode::InvalidEllipticity,
            "need 0 < a <= A, got a=" + std::to_string(a) + " A=" + std::to_string(big_a));
}

/// A * sum(lambda+) - a * sum(lambda-)
inline double pucci_plus(double a, double big_a, const SymMatrix& m) {
    check_ellipticity(a, big_a);
    double pos = 0.0, neg = 0.0;
    for (double l : sym_eigenvalues(m)) {
        if (l > 0.0) pos += l; else neg -= l;
    }
    return big_a * pos - a * neg;
}

/// a * sum(lambda+) - A * sum(lambda-)
inline double pucci_minus(double a, double big_a, const SymMatrix& m) {
    check_ellipticity(a, big_a);
    double pos = 0.0, neg = 0.0;
    for (double l : sym_eigenvalues(m)) {
        if (l > 0.0) pos += l; else neg -= l;
    }
    return a * pos - big_a * neg;
}

} // namespace mixedbvp
