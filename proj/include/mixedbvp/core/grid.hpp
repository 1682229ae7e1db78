#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/geometry/domain.hpp"

namespace mixedbvp {

enum class NodeClass : unsigned char { Interior, DirichletBdry, NeumannBdry, WedgeBdry, Exterior };

constexpr std::string_view to_string(NodeClass c) {
    switch (c) {
    case NodeClass::Interior: return "interior";
    case NodeClass::DirichletBdry: return "dirichlet";
    case NodeClass::NeumannBdry: return "neumann";
    case NodeClass::WedgeBdry: return "wedge";
    case NodeClass::Exterior: return "exterior";
    }
    return "?";
}

/// Nodes held fixed by the scheme.
constexpr bool is_pinned(NodeClass c) { return c == NodeClass::DirichletBdry || c == NodeClass::WedgeBdry; }

/// Nodes carrying an equation.
constexpr bool is_active(NodeClass c) { return c == NodeClass::Interior || c == NodeClass::NeumannBdry; }

/// Uniform Cartesian grid lo + h * (i, j[, k]).
struct GridSpec {
    int dim = 2;
    Vec lo;
    double h = 0.1;
    std::array<int, 3> n{1, 1, 1};

    /// Smallest grid with spacing h covering the box [lo, hi].
    static GridSpec covering(const Vec& lo, const Vec& hi, double h) {
        require(h > 0.0 && std::isfinite(h), ErrorCode::InvalidArgument, "grid spacing must be positive");
        GridSpec g;
        g.dim = lo.dim();
        g.lo = lo;
        g.h = h;
        for (int i = 0; i < g.dim; ++i) {
            const double cells = (hi[i] - lo[i]) / h;
            g.n[i] = static_cast<int>(std::ceil(cells - 1e-9)) + 1;
        }
        return g;
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n[i]);
        return s;
    }

    std::size_t index(int i, int j, int k = 0) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n[0]) *
                                                 (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * k);
    }

    std::array<int, 3> multi(std::size_t idx) const {
        std::array<int, 3> m{0, 0, 0};
        m[0] = static_cast<int>(idx % n[0]);
        idx /= n[0];
        m[1] = static_cast<int>(idx % n[1]);
        m[2] = static_cast<int>(idx / n[1]);
        return m;
    }

    bool in_range(const std::array<int, 3>& m) const {
        for (int i = 0; i < dim; ++i)
            if (m[i] < 0 || m[i] >= n[i]) return false;
        return true;
    }

    Vec coord(std::size_t idx) const {
        const auto m = multi(idx);
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x[i] = lo[i] + h * m[i];
        return x;
    }

    bool same_as(const GridSpec& o) const {
        if (dim != o.dim || h != o.h) return false;
        for (int i = 0; i < dim; ++i)
            if (n[i] != o.n[i] || lo[i] != o.lo[i]) return false;
        return true;
    }
};

/// Node classes for a domain. Nodes within `snap` (default 0.05 h) of the
/// boundary are boundary nodes; nodes within h/2 of a wedge point are wedge
/// nodes.
inline std::vector<NodeClass> classify_nodes(const DomainSpec& domain, const GridSpec& grid, double snap = -1.0) {
    require(domain.dim() == grid.dim, ErrorCode::GridMismatch, "grid and domain dimensions differ");
    if (snap < 0.0) snap = 0.05 * grid.h;
    const double wedge_tol = 0.5 * grid.h;
    const auto wedges = domain.wedge_points();
    std::vector<NodeClass> cls(grid.size(), NodeClass::Exterior);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec x = grid.coord(i);
        const auto nb = domain.nearest_boundary(x);
        const bool inside = domain.contains_exact(x);
        if (!inside && nb.distance > 1e-12 * grid.h) continue;
        if (nb.distance > snap) {
            cls[i] = NodeClass::Interior;
            continue;
        }
        bool wedge = false;
        if (domain.dim() == 2) {
            for (const Vec& w : wedges)
                if (norm(x - w) <= wedge_tol) wedge = true;
        } else {
            wedge = domain.distance_to_kind(x, BoundaryKind::Dirichlet) <= wedge_tol &&
                    domain.distance_to_kind(x, BoundaryKind::Neumann) <= wedge_tol;
        }
        if (wedge) {
            cls[i] = NodeClass::WedgeBdry;
        } else if (domain.pieces()[nb.piece].kind == BoundaryKind::Dirichlet) {
            cls[i] = NodeClass::DirichletBdry;
        } else {
            cls[i] = NodeClass::NeumannBdry;
        }
    }
    return cls;
}

/// Scalar field on a grid with per-node classes.
struct GridField {
    GridSpec grid;
    std::vector<double> values;
    std::vector<NodeClass> node_class;

    GridField() = default;
    GridField(GridSpec g, std::vector<NodeClass> cls, double init = 0.0)
        : grid(std::move(g)), values(cls.size(), init), node_class(std::move(cls)) {
        require(node_class.size() == grid.size(), ErrorCode::GridMismatch, "class array does not match grid");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (node_class[i] == NodeClass::Exterior) values[i] = std::numeric_limits<double>::quiet_NaN();
    }

    static GridField on_domain(const DomainSpec& domain, double h, double init = 0.0) {
        GridSpec g = GridSpec::covering(domain.box_lo(), domain.box_hi(), h);
        auto cls = classify_nodes(domain, g);
        return GridField(std::move(g), std::move(cls), init);
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    Vec coord(std::size_t i) const { return grid.coord(i); }

    bool same_layout(const GridField& o) const { return grid.same_as(o.grid) && node_class == o.node_class; }

    /// Max |u| over non-exterior nodes.
    double sup_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (node_class[i] != NodeClass::Exterior) m = std::max(m, std::abs(values[i]));
        return m;
    }

    /// Every non-exterior node holds a finite value.
    bool finite() const {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (node_class[i] != NodeClass::Exterior && !std::isfinite(values[i])) return false;
        return true;
    }

    template <class Fn>
    void fill(Fn&& fn) {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (node_class[i] != NodeClass::Exterior) values[i] = fn(grid.coord(i));
    }
};

/// Sup over common non-exterior nodes of |u - v|.
inline double sup_difference(const GridField& u, const GridField& v) {
    require(u.same_layout(v), ErrorCode::GridMismatch, "fields live on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.node_class[i] != NodeClass::Exterior) m = std::max(m, std::abs(u[i] - v[i]));
    return m;
}

} // namespace mixedbvp
