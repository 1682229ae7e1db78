#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/core/operator.hpp"

namespace mixedbvp {

/// A diffeomorphism y = H(x) with inverse x = G(y) and closed-form
/// derivatives. jacobian(x)(k, i) = dH_k/dx_i; hessians(x)[k] = D^2 H_k(x).
struct DiffeoSpec {
    int dim = 2;
    std::function<Vec(const Vec&)> map;
    std::function<Vec(const Vec&)> inverse;
    std::function<Mat(const Vec&)> jacobian;
    std::function<std::vector<SymMatrix>(const Vec&)> hessians;
    std::function<Mat(const Vec&)> inverse_jacobian;
    std::function<std::vector<SymMatrix>(const Vec&)> inverse_hessians;
    /// Lower bound m on |det grad H| over the patch.
    double det_floor = 1e-8;

    static DiffeoSpec identity(int dim) { return linear(Mat::identity(dim)); }

    /// H(x) = L x.
    static DiffeoSpec linear(const Mat& l) {
        const int n = l.dim();
        const double det = l.determinant();
        require(std::abs(det) > 0.0, ErrorCode::SingularJacobian, "linear map is singular");
        Mat inv(n);
        if (n == 2) {
            inv = Mat::from_rows({{l(1, 1) / det, -l(0, 1) / det}, {-l(1, 0) / det, l(0, 0) / det}});
        } else {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
                    inv(i, j) = (l(r0, c0) * l(r1, c1) - l(r0, c1) * l(r1, c0)) / det;
                }
        }
        DiffeoSpec d;
        d.dim = n;
        d.map = [l](const Vec& x) { return l * x; };
        d.inverse = [inv](const Vec& y) { return inv * y; };
        d.jacobian = [l](const Vec&) { return l; };
        d.inverse_jacobian = [inv](const Vec&) { return inv; };
        d.hessians = [n](const Vec&) { return std::vector<SymMatrix>(n, SymMatrix(n)); };
        d.inverse_hessians = d.hessians;
        return d;
    }

    /// H(x1, x2) = (x1, x2 - c x1^2): flattens the parabola x2 = c x1^2 onto y2 = 0.
    static DiffeoSpec parabolic_flattening(double c) {
        DiffeoSpec d;
        d.dim = 2;
        d.map = [c](const Vec& x) { return Vec{x[0], x[1] - c * x[0] * x[0]}; };
        d.inverse = [c](const Vec& y) { return Vec{y[0], y[1] + c * y[0] * y[0]}; };
        d.jacobian = [c](const Vec& x) { return Mat::from_rows({{1.0, 0.0}, {-2.0 * c * x[0], 1.0}}); };
        d.inverse_jacobian = [c](const Vec& y) { return Mat::from_rows({{1.0, 0.0}, {2.0 * c * y[0], 1.0}}); };
        d.hessians = [c](const Vec&) { return std::vector<SymMatrix>{SymMatrix(2), SymMatrix::diag({-2.0 * c, 0.0})}; };
        d.inverse_hessians = [c](const Vec&) {
            return std::vector<SymMatrix>{SymMatrix(2), SymMatrix::diag({2.0 * c, 0.0})};
        };
        return d;
    }

    /// The same diffeomorphism read backwards: G becomes the forward map.
    DiffeoSpec inverted() const {
        DiffeoSpec d = *this;
        std::swap(d.map, d.inverse);
        std::swap(d.jacobian, d.inverse_jacobian);
        std::swap(d.hessians, d.inverse_hessians);
        return d;
    }
};

struct DiffeoCheck {
    double max_roundtrip_error = 0.0;
    double min_abs_det = std::numeric_limits<double>::infinity();
};

/// |G(H(x)) - x| and |det grad H| over sample points.
inline DiffeoCheck check_diffeo(const DiffeoSpec& d, const std::vector<Vec>& xs) {
    DiffeoCheck c;
    for (const Vec& x : xs) {
        c.max_roundtrip_error = std::max(c.max_roundtrip_error, norm(d.inverse(d.map(x)) - x));
        c.min_abs_det = std::min(c.min_abs_det, std::abs(d.jacobian(x).determinant()));
    }
    return c;
}

struct TransformedOperator {
    OperatorSpec op;
    /// Transformed Neumann direction nu at y = H(x) for a flat boundary {y_N = 0}.
    std::function<Vec(const Vec& y)> nu;
};

/// F_H(y, p, M) = F(G(y), grad H^T p, grad H^T M grad H + sum_k p_k D^2 H_k)
/// evaluated at x = G(y), together with nu(H(x)) = grad H(x) (-grad H_N / |grad H_N|).
/// `samples` are points x of the patch used to check the Jacobian floor
/// and to bound the transformed ellipticity constants.
inline TransformedOperator transform_operator(const OperatorSpec& f, const DiffeoSpec& d,
                                              const std::vector<Vec>& samples) {
    check_operator_constants(f);
    require(!samples.empty(), ErrorCode::InvalidArgument, "transform_operator needs sample points");
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0, hmax = 0.0, jmax = 0.0;
    for (const Vec& x : samples) {
        const Mat j = d.jacobian(x);
        const double det = j.determinant();
        require(std::abs(det) >= d.det_floor, ErrorCode::SingularJacobian,
                "|det grad H| = " + std::to_string(std::abs(det)) + " below the floor");
        const auto ev = sym_eigenvalues(congruence(j, SymMatrix::identity(d.dim)));
        smin = std::min(smin, ev.front());
        smax = std::max(smax, ev.back());
        jmax = std::max(jmax, std::sqrt(ev.back()));
        double hs = 0.0;
        for (const auto& hk : d.hessians(x)) hs += hk.frobenius() * hk.frobenius();
        hmax = std::max(hmax, std::sqrt(hs));
    }

    const OperatorSpec base = f;
    const DiffeoSpec diffeo = d;
    OperatorFn fn = [base, diffeo](const Vec& y, const Vec& p, const SymMatrix& m) {
        const Vec x = diffeo.inverse(y);
        const Mat j = diffeo.jacobian(x);
        const Mat jt = j.transpose();
        SymMatrix mh = congruence(j, m);
        const auto hs = diffeo.hessians(x);
        for (int k = 0; k < diffeo.dim; ++k) mh += p[k] * hs[k];
        return base(x, jt * p, mh);
    };

    OperatorSpec out = OperatorSpec::make_custom(std::move(fn), f.a * smin, std::max(f.big_a * smax, f.a * smin),
                                                 f.alpha, f.lip_p * jmax + f.big_a * hmax, f.c_f, f.theta_f,
                                                 f.homogeneous);
    TransformedOperator t;
    t.op = std::move(out);
    t.nu = [diffeo](const Vec& y) {
        const Vec x = diffeo.inverse(y);
        const Mat j = diffeo.jacobian(x);
        const int n = diffeo.dim;
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = j(n - 1, i);
        const Vec dir = (-1.0 / norm(g)) * g;
        return j * dir;
    };
    return t;
}

} // namespace mixedbvp
