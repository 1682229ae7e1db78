#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/pucci/eigen.hpp"
#include "mixedbvp/pucci/pucci.hpp"

namespace mixedbvp {

struct Witness {
    Vec x, p;
    SymMatrix m;
};

struct HypothesisReport {
    bool h1_pass = true;
    bool h2_pass = true;
    bool h3_pass = true;
    bool h4_pass = true;
    double worst_violation = 0.0;
    std::optional<Witness> witness;

    bool all_pass() const { return h1_pass && h2_pass && h3_pass && h4_pass; }
};

/// One sample for all four checks: points x, y, gradients p, q, a
/// symmetric M and a positive semidefinite P.
struct HypothesisSample {
    Vec x, y, p, q;
    SymMatrix m, psd;
};

struct SampleRanges {
    double x_half_width = 1.0;
    double p_radius = 10.0;
    double m_scale = 1.0;
};

/// Deterministic pseudo-random samples from a seeded mt19937_64.
inline std::vector<HypothesisSample> make_hypothesis_samples(int dim, int count, std::uint64_t seed = 0,
                                                             SampleRanges ranges = {}) {
    check_dim(dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto vec = [&](double scale) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = scale * unit(rng);
        return v;
    };
    auto sym = [&](double scale) {
        SymMatrix s(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) s.set(i, j, scale * unit(rng));
        return s;
    };
    std::vector<HypothesisSample> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        HypothesisSample s;
        s.x = vec(ranges.x_half_width);
        s.y = vec(ranges.x_half_width);
        s.p = vec(ranges.p_radius / std::sqrt(static_cast<double>(dim)));
        s.q = vec(ranges.p_radius / std::sqrt(static_cast<double>(dim)));
        s.m = sym(ranges.m_scale);
        SymMatrix psd(dim);
        for (int r = 0; r < dim; ++r) psd += SymMatrix::outer(vec(ranges.m_scale));
        s.psd = psd;
        out.push_back(s);
    }
    return out;
}

namespace detail {
inline double hyp_tol(const SymMatrix& m, const SymMatrix& p = SymMatrix(2)) {
    return 1e-10 * (1.0 + m.frobenius() + p.frobenius());
}

inline void record(HypothesisReport& r, bool& flag, double excess, const Witness& w) {
    if (excess <= 0.0) return;
    flag = false;
    if (excess > r.worst_violation || !r.witness) {
        r.worst_violation = std::max(r.worst_violation, excess);
        r.witness = w;
    }
}
} // namespace detail

/// M^-(M) <= F(x, p, M) <= M^+(M) at every sample. Violations are reported
/// in the h2 slot with the worst excess and its witness.
inline HypothesisReport check_sandwich(const OperatorSpec& op, const std::vector<HypothesisSample>& samples) {
    check_operator_constants(op);
    HypothesisReport r;
    for (const auto& s : samples) {
        for (const SymMatrix& m : {s.m, SymMatrix::identity(s.m.dim()), -SymMatrix::identity(s.m.dim())}) {
            const double v = op(s.x, s.p, m);
            const double tol = detail::hyp_tol(m);
            const double over = std::max(v - op.upper_bound(m), op.lower_bound(m) - v) - tol;
            detail::record(r, r.h2_pass, over, Witness{s.x, s.p, m});
        }
    }
    return r;
}

/// Sample-based falsifier for the four structure conditions:
/// F(x,p,0) = 0; a tr P <= F(x,p,M+P) - F(x,p,M) <= A tr P;
/// |F(x,p,M) - F(x,q,M)| <= lip_p |p-q|; |F(x,p,M) - F(y,p,M)| <= c_F |M| |x-y|^theta_F
/// with |M| the spectral radius.
inline HypothesisReport check_hypotheses(const OperatorSpec& op, const std::vector<HypothesisSample>& samples) {
    check_operator_constants(op);
    HypothesisReport r;
    for (const auto& s : samples) {
        const int n = s.m.dim();
        const SymMatrix zero(n);

        const double f0 = op(s.x, s.p, zero);
        detail::record(r, r.h1_pass, std::abs(f0) - detail::hyp_tol(zero), Witness{s.x, s.p, zero});

        const double fm = op(s.x, s.p, s.m);
        const double fmp = op(s.x, s.p, s.m + s.psd);
        const double tr = s.psd.trace();
        const double tol2 = detail::hyp_tol(s.m, s.psd);
        const double d = fmp - fm;
        detail::record(r, r.h2_pass, std::max(op.a * tr - d, d - op.big_a * tr) - tol2,
                       Witness{s.x, s.p, s.m});

        const double fq = op(s.x, s.q, s.m);
        detail::record(r, r.h3_pass,
                       std::abs(fm - fq) - op.lip_p * norm(s.p - s.q) - detail::hyp_tol(s.m),
                       Witness{s.x, s.q, s.m});

        const double fy = op(s.y, s.p, s.m);
        const double bound = op.c_f * spectral_radius(s.m) * std::pow(norm(s.x - s.y), op.theta_f);
        detail::record(r, r.h4_pass, std::abs(fm - fy) - bound - detail::hyp_tol(s.m),
                       Witness{s.y, s.p, s.m});
    }
    return r;
}

} // namespace mixedbvp
