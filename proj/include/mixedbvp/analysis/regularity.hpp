#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/geometry/domain.hpp"

namespace mixedbvp {

struct ComparisonGap {
    double max_gap = 0.0;
    std::size_t witness = 0;
};

/// max over non-exterior nodes of u - v, with the first node attaining it.
inline ComparisonGap comparison_gap(const GridField& u, const GridField& v) {
    require(u.same_layout(v), ErrorCode::GridMismatch, "comparison_gap needs fields on the same grid");
    ComparisonGap g;
    g.max_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node_class[i] == NodeClass::Exterior) continue;
        const double d = u[i] - v[i];
        if (d > g.max_gap) {
            g.max_gap = d;
            g.witness = i;
        }
    }
    require(std::isfinite(g.max_gap), ErrorCode::InvalidArgument, "no finite nodal values to compare");
    return g;
}

/// max |u| over annuli around `center` ~ C rho^gamma.
struct HolderFit {
    Vec center;
    double gamma_hat = 0.0;
    double c_hat = 0.0;
    /// max_k |m_k / (C rho_k^gamma) - 1|
    double fit_residual = 0.0;
    std::vector<double> radii_used;
    std::vector<double> annulus_max;
    /// The field vanishes on every annulus; gamma_hat is meaningless.
    bool degenerate = false;
};

/// Default radii 2^k (2h) up to half the distance to the nearest other
/// wedge point (or half the domain diameter).
inline std::vector<double> default_holder_radii(const DomainSpec& domain, const Vec& center, double h) {
    double cap = domain.diameter();
    for (const Vec& w : domain.wedge_points()) {
        const double d = norm(w - center);
        if (d > 0.5 * h) cap = std::min(cap, d);
    }
    cap *= 0.5;
    std::vector<double> radii;
    for (double rho = 2.0 * h; rho <= cap * (1.0 + 1e-12); rho *= 2.0) radii.push_back(rho);
    return radii;
}

/// Log-log least squares of max_{rho/sqrt2 < |x - center| <= rho} |u(x)|
/// against rho. Annuli below 2h, without nodes or with zero maximum are
/// skipped; fewer than 3 usable annuli raise InsufficientRadii unless the
/// field vanishes on all of them (degenerate, C_hat = 0).
inline HolderFit holder_fit(const GridField& u, const Vec& center, const std::vector<double>& radii) {
    require(center.dim() == u.grid.dim, ErrorCode::GridMismatch, "center dimension differs from the grid");
    const double h = u.grid.h;
    double nearest = std::numeric_limits<double>::infinity();
    NodeClass nearest_class = NodeClass::Exterior;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node_class[i] == NodeClass::Exterior) continue;
        const double d = norm(u.coord(i) - center);
        if (d < nearest) {
            nearest = d;
            nearest_class = u.node_class[i];
        }
    }
    require(nearest <= 0.5 * h && is_pinned(nearest_class), ErrorCode::PreconditionFailed,
            "holder_fit center must be a Wedge or Dirichlet node");

    HolderFit fit;
    fit.center = center;
    std::vector<double> rho_all, m_all;
    int zero_annuli = 0;
    for (double rho : radii) {
        if (!(rho >= 2.0 * h * (1.0 - 1e-12))) continue;
        const double inner = rho / std::sqrt(2.0);
        double m = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.node_class[i] == NodeClass::Exterior) continue;
            const double d = norm(u.coord(i) - center);
            if (d > inner && d <= rho * (1.0 + 1e-12)) {
                any = true;
                m = std::max(m, std::abs(u[i]));
            }
        }
        if (!any) continue;
        if (m == 0.0) {
            ++zero_annuli;
            continue;
        }
        rho_all.push_back(rho);
        m_all.push_back(m);
    }
    if (rho_all.empty() && zero_annuli >= 3) {
        fit.degenerate = true;
        return fit;
    }
    require(rho_all.size() >= 3, ErrorCode::InsufficientRadii,
            "holder_fit needs at least 3 usable annuli, found " + std::to_string(rho_all.size()));

    const double n = static_cast<double>(rho_all.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < rho_all.size(); ++k) {
        const double x = std::log(rho_all[k]), y = std::log(m_all[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.gamma_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.c_hat = std::exp((sy - fit.gamma_hat * sx) / n);
    for (std::size_t k = 0; k < rho_all.size(); ++k)
        fit.fit_residual =
            std::max(fit.fit_residual, std::abs(m_all[k] / (fit.c_hat * std::pow(rho_all[k], fit.gamma_hat)) - 1.0));
    fit.radii_used = std::move(rho_all);
    fit.annulus_max = std::move(m_all);
    return fit;
}

inline HolderFit holder_fit(const GridField& u, const DomainSpec& domain, const Vec& center) {
    return holder_fit(u, center, default_holder_radii(domain, center, u.grid.h));
}

/// Which bound of the global estimate applies: a positive max(u - v) uses
/// u(x) - v(y) <= max(u - v) + M|x - y|, otherwise u(x) - v(y) <= M|x - y|^gamma.
enum class ModulusMode { Lipschitz, Holder };

constexpr std::string_view to_string(ModulusMode m) { return m == ModulusMode::Lipschitz ? "lipschitz" : "holder"; }

struct ModulusReport {
    double lipschitz_m = 0.0;
    double holder_m = 0.0;
    double max_gap = 0.0;
    ModulusMode mode = ModulusMode::Holder;
    double gamma = 0.5;
    std::size_t pairs = 0;
    /// Largest lattice offset 2^K per axis (-1 when all pairs were scanned).
    int max_offset_exponent = -1;
    std::size_t node_stride = 1;
};

/// Sup over node pairs x != y of (u(x) - v(y) - max(u - v)) / |x - y| and
/// (u(x) - v(y)) / |x - y|^gamma. Up to `max_pairs` all ordered pairs are
/// used; beyond that each node is paired with the lattice offsets
/// {0, +-1, +-2, ..., +-2^K}^N for the largest K that fits, striding
/// through nodes if even K = 0 does not.
inline ModulusReport modulus_report(const GridField& u, const GridField& v, double gamma,
                                    std::size_t max_pairs = 1000000) {
    require(u.same_layout(v), ErrorCode::GridMismatch, "modulus_report needs fields on the same grid");
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    ModulusReport rep;
    rep.gamma = gamma;
    rep.max_gap = comparison_gap(u, v).max_gap;
    rep.mode = rep.max_gap > 0.0 ? ModulusMode::Lipschitz : ModulusMode::Holder;
    rep.lipschitz_m = -std::numeric_limits<double>::infinity();
    rep.holder_m = -std::numeric_limits<double>::infinity();

    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.node_class[i] != NodeClass::Exterior) nodes.push_back(i);
    const std::size_t n = nodes.size();
    const GridSpec& g = u.grid;

    auto visit = [&](std::size_t i, std::size_t j) {
        const double d = norm(g.coord(i) - g.coord(j));
        const double diff = u[i] - v[j];
        rep.lipschitz_m = std::max(rep.lipschitz_m, (diff - rep.max_gap) / d);
        rep.holder_m = std::max(rep.holder_m, diff / std::pow(d, gamma));
        ++rep.pairs;
    };

    if (n < 2 || n * (n - 1) <= max_pairs) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b) visit(nodes[a], nodes[b]);
    } else {
        auto offsets_for = [&](int k) {
            std::vector<int> steps{0};
            for (int e = 0; e <= k; ++e) {
                steps.push_back(1 << e);
                steps.push_back(-(1 << e));
            }
            return steps;
        };
        auto offset_count = [&](int k) {
            std::size_t c = 1;
            for (int i = 0; i < g.dim; ++i) c *= offsets_for(k).size();
            return c - 1;
        };
        int k = 0;
        while (k < 30 && n * offset_count(k + 1) <= max_pairs && (1 << (k + 1)) < std::max({g.n[0], g.n[1], g.n[2]}))
            ++k;
        std::size_t stride = 1;
        while ((n / stride + 1) * offset_count(k) > max_pairs) ++stride;
        rep.max_offset_exponent = k;
        rep.node_stride = stride;
        const std::vector<int> steps = offsets_for(k);
        const std::size_t s = steps.size();
        const std::size_t combos = g.dim == 2 ? s * s : s * s * s;
        for (std::size_t a = 0; a < n; a += stride) {
            const std::size_t i = nodes[a];
            const auto m = g.multi(i);
            for (std::size_t c = 0; c < combos; ++c) {
                std::array<int, 3> q = m;
                std::size_t r = c;
                bool zero = true;
                for (int ax = 0; ax < g.dim; ++ax) {
                    const int o = steps[r % s];
                    r /= s;
                    q[ax] += o;
                    zero = zero && o == 0;
                }
                if (zero || !g.in_range(q)) continue;
                const std::size_t j = g.index(q[0], q[1], q[2]);
                if (u.node_class[j] == NodeClass::Exterior) continue;
                visit(i, j);
            }
        }
    }
    if (rep.pairs == 0) {
        rep.lipschitz_m = 0.0;
        rep.holder_m = 0.0;
    }
    return rep;
}

} // namespace mixedbvp
