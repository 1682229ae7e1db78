#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mixedbvp/core/linalg.hpp"

namespace mixedbvp {

/// Ascending eigenvalues of a symmetric 2x2 or 3x3 matrix.
///
/// Dimension 2 uses the closed-form quadratic (with hypot to avoid
/// overflow); dimension 3 uses cyclic Jacobi rotations until the
/// off-diagonal mass falls below 1e-14 relative to the Frobenius norm.
inline std::vector<double> sym_eigenvalues(const SymMatrix& m) {
    if (m.dim() == 2) {
        const double mean = 0.5 * (m(0, 0) + m(1, 1));
        const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
        const double rad = std::hypot(half_diff, m(0, 1));
        return {mean - rad, mean + rad};
    }

    std::array<std::array<double, 3>, 3> a{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);

    const double scale = std::max(m.frobenius(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
        if (off <= 1e-14 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Largest eigenvalue magnitude.
inline double spectral_radius(const SymMatrix& m) {
    const auto ev = sym_eigenvalues(m);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

} // namespace mixedbvp
