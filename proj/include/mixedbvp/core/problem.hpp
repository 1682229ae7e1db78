#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/geometry/domain.hpp"
#include "mixedbvp/pucci/hypotheses.hpp"

namespace mixedbvp {

using ScalarField = std::function<double(const Vec&)>;

inline ScalarField constant_field(double c) {
    return [c](const Vec&) { return c; };
}

/// -|grad u|^alpha F(x, grad u, D^2 u) + beta(u) = f in the domain,
/// u = dirichlet_value on D, du/dn = 0 on N.
struct ProblemSpec {
    DomainSpec domain;
    OperatorSpec op;
    Beta beta = Beta::zero();
    ScalarField f = constant_field(0.0);
    ScalarField dirichlet_value = constant_field(0.0);
    /// Filled by validate_problem: which structure conditions were sample-checked.
    std::optional<HypothesisReport> verified = std::nullopt;
};

struct ValidationOptions {
    int hypothesis_samples = 256;
    std::uint64_t seed = 0;
    int lattice = 33;
};

/// Checks the standing assumptions and returns the spec unchanged apart
/// from the `verified` record. Idempotent.
inline ProblemSpec validate_problem(ProblemSpec spec, const ValidationOptions& opts = {}) {
    check_operator_constants(spec.op);

    const Beta& b = spec.beta;
    require(std::abs(b(0.0)) <= 1e-14, ErrorCode::NonMonotoneBeta, "beta(0) must vanish");
    double prev_t = -64.0, prev = b(prev_t);
    for (int k = 1; k <= 512; ++k) {
        const double t = -64.0 + 128.0 * k / 512.0;
        const double v = b(t);
        require(v >= prev - 1e-12 * (1.0 + std::abs(prev)), ErrorCode::NonMonotoneBeta,
                "beta decreases between t=" + std::to_string(prev_t) + " and t=" + std::to_string(t));
        prev = v;
        prev_t = t;
    }

    const int n = spec.domain.dim();
    const Vec lo = spec.domain.box_lo(), hi = spec.domain.box_hi();
    const int m = opts.lattice;
    const int total = n == 2 ? m * m : m * m * m;
    for (int idx = 0; idx < total; ++idx) {
        Vec x(n);
        int r = idx;
        for (int i = 0; i < n; ++i) {
            x[i] = lo[i] + (hi[i] - lo[i]) * (r % m) / (m - 1);
            r /= m;
        }
        if (!spec.domain.contains_exact(x)) continue;
        require(std::isfinite(spec.f(x)), ErrorCode::InvalidArgument,
                "source is not finite at a lattice point");
    }

    if (spec.op.kind == OperatorKind::Custom) {
        SampleRanges ranges;
        ranges.x_half_width = 0.5 * spec.domain.diameter();
        const auto samples = make_hypothesis_samples(n, opts.hypothesis_samples, opts.seed, ranges);
        spec.verified = check_hypotheses(spec.op, samples);
    } else {
        spec.verified = HypothesisReport{};
    }
    return spec;
}

} // namespace mixedbvp
