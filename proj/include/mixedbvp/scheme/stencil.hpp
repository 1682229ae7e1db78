#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/pucci/pucci.hpp"

namespace mixedbvp {

enum class GradMode { Centered, Upwind };

constexpr std::string_view to_string(GradMode m) { return m == GradMode::Centered ? "centered" : "upwind"; }

/// Lattice directions of the wide stencil. In 2-D `direction_count` is 4, 8
/// or 16 and needs reach 1, 2 or 3; in 3-D the stencil is the axes plus the
/// six face diagonals whatever the count.
struct StencilSpec {
    int direction_count = 4;
    int reach = 1;
    GradMode grad_mode = GradMode::Centered;

    static StencilSpec with_directions(int count, GradMode mode = GradMode::Centered) {
        StencilSpec s;
        s.direction_count = count;
        s.reach = count <= 4 ? 1 : (count <= 8 ? 2 : 3);
        s.grad_mode = mode;
        return s;
    }
};

/// |grad u|_eps = sqrt(|grad u|^2 + eps^2). A negative eps_grad means eps = h.
struct Regularization {
    double eps_grad = -1.0;

    double eps(double h) const { return eps_grad < 0.0 ? h : eps_grad; }
};

inline void check_regularization(const Regularization& reg, double alpha) {
    require(!(reg.eps_grad == 0.0 && alpha < 0.0), ErrorCode::InvalidArgument,
            "eps_grad = 0 is only allowed for alpha >= 0");
}

using Offset = std::array<int, 3>;

/// Directions (axes first) and the orthogonal frames built from them.
struct DirectionSet {
    int dim = 2;
    std::vector<Offset> dirs;
    std::vector<std::vector<int>> frames;  // frames[0] is the axis frame
    /// Index of e_i + e_j and e_i - e_j (i < j) for Hessian assembly.
    std::array<std::array<int, 3>, 3> diag_plus{}, diag_minus{};

    double norm2(int k) const {
        const Offset& o = dirs[k];
        return static_cast<double>(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]);
    }
};

inline DirectionSet make_direction_set(int dim, const StencilSpec& s) {
    check_dim(dim);
    require(s.direction_count >= 4 && s.direction_count % 2 == 0, ErrorCode::InvalidArgument,
            "direction_count must be even and at least 4");
    DirectionSet d;
    d.dim = dim;
    auto add = [&](Offset o) {
        for (int k = 0; k < static_cast<int>(d.dirs.size()); ++k)
            if (d.dirs[k] == o || d.dirs[k] == Offset{-o[0], -o[1], -o[2]}) return k;
        d.dirs.push_back(o);
        return static_cast<int>(d.dirs.size()) - 1;
    };
    if (dim == 2) {
        require(s.direction_count == 4 || s.direction_count == 8 || s.direction_count == 16,
                ErrorCode::InvalidArgument, "2-D stencils have 4, 8 or 16 directions");
        const int need = s.direction_count == 4 ? 1 : (s.direction_count == 8 ? 2 : 3);
        require(s.reach >= need, ErrorCode::InvalidArgument,
                std::to_string(s.direction_count) + " directions need reach " + std::to_string(need));
        std::vector<std::array<int, 2>> gens{{1, 0}, {1, 1}};
        if (s.direction_count >= 8) gens.insert(gens.end(), {{2, 1}, {1, 2}});
        if (s.direction_count >= 16) gens.insert(gens.end(), {{3, 1}, {1, 3}, {3, 2}, {2, 3}});
        for (auto [p, q] : gens) {
            const int k0 = add({p, q, 0});
            const int k1 = add({-q, p, 0});
            d.frames.push_back({k0, k1});
        }
        d.diag_plus[0][1] = add({1, 1, 0});
        d.diag_minus[0][1] = add({1, -1, 0});
    } else {
        const int e0 = add({1, 0, 0}), e1 = add({0, 1, 0}), e2 = add({0, 0, 1});
        d.frames.push_back({e0, e1, e2});
        const int axes[3] = {e0, e1, e2};
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                Offset pl{0, 0, 0}, mi{0, 0, 0};
                pl[i] = 1;
                pl[j] = 1;
                mi[i] = 1;
                mi[j] = -1;
                d.diag_plus[i][j] = add(pl);
                d.diag_minus[i][j] = add(mi);
                d.frames.push_back({d.diag_plus[i][j], d.diag_minus[i][j], axes[3 - i - j]});
            }
        }
    }
    return d;
}

namespace detail {

inline double lattice_value(const GridField& u, const std::array<int, 3>& m, const Offset& o, int sign) {
    std::array<int, 3> q{m[0] + sign * o[0], m[1] + sign * o[1], m[2] + sign * o[2]};
    require(u.grid.in_range(q), ErrorCode::MissingNeighbor, "stencil arm leaves the grid");
    const std::size_t j = u.grid.index(q[0], q[1], q[2]);
    require(u.node_class[j] != NodeClass::Exterior, ErrorCode::MissingNeighbor,
            "stencil arm reaches an exterior node");
    return u[j];
}

inline double pucci_combine(bool plus, double a, double big_a, double delta) {
    const double pos = delta > 0.0 ? delta : 0.0, neg = delta < 0.0 ? -delta : 0.0;
    return plus ? big_a * pos - a * neg : a * pos - big_a * neg;
}

} // namespace detail

/// Gradient from lattice neighbours only; nodes whose arms need boundary
/// handling raise MissingNeighbor.
inline Vec gradient_stencil(const GridField& u, std::size_t node, GradMode mode = GradMode::Centered) {
    const int n = u.grid.dim;
    const auto m = u.grid.multi(node);
    const double h = u.grid.h;
    Vec g(n);
    for (int i = 0; i < n; ++i) {
        Offset e{0, 0, 0};
        e[i] = 1;
        const double up = detail::lattice_value(u, m, e, 1), dn = detail::lattice_value(u, m, e, -1);
        if (mode == GradMode::Centered) {
            g[i] = (up - dn) / (2.0 * h);
        } else {
            const double fwd = std::min((up - u[node]) / h, 0.0), bwd = std::max((u[node] - dn) / h, 0.0);
            g[i] = bwd >= -fwd ? bwd : fwd;
        }
    }
    return g;
}

/// Frame-max discrete Pucci operator from lattice neighbours:
/// max over frames of sum_v A (D_v u)^+ - a (D_v u)^- for the maximal
/// operator, the min of the mirrored sum for the minimal one, with
/// D_v u = (u(x+hv) - 2u(x) + u(x-hv)) / (h|v|)^2. When a = A only the axis
/// frame is used.
inline double discrete_pucci(const GridField& u, std::size_t node, double a, double big_a, const StencilSpec& stencil,
                             bool plus = true) {
    check_ellipticity(a, big_a);
    const DirectionSet ds = make_direction_set(u.grid.dim, stencil);
    const auto m = u.grid.multi(node);
    const double h2 = u.grid.h * u.grid.h;
    std::vector<double> delta(ds.dirs.size());
    for (std::size_t k = 0; k < ds.dirs.size(); ++k) {
        const double up = detail::lattice_value(u, m, ds.dirs[k], 1), dn = detail::lattice_value(u, m, ds.dirs[k], -1);
        delta[k] = (up - 2.0 * u[node] + dn) / (h2 * ds.norm2(static_cast<int>(k)));
    }
    const std::size_t frame_count = a == big_a ? 1 : ds.frames.size();
    double best = plus ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < frame_count; ++f) {
        double s = 0.0;
        for (int k : ds.frames[f]) s += detail::pucci_combine(plus, a, big_a, delta[k]);
        best = plus ? std::max(best, s) : std::min(best, s);
    }
    return best;
}

} // namespace mixedbvp
