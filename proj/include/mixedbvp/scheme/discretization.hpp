#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/core/problem.hpp"
#include "mixedbvp/scheme/stencil.hpp"

namespace mixedbvp {

/// One half of a stencil direction at a node: the far value is
/// `constant + sum w_j u_j` and the arm length is `s` lattice steps.
struct Arm {
    std::uint32_t begin = 0;
    std::uint32_t count = 0;
    double constant = 0.0;
    double s = 1.0;
    double self_weight = 0.0;
    double coef = 0.0;  // weight of (far - u) in the second difference
};

struct ArmEntry {
    std::uint32_t node = 0;
    double weight = 0.0;
};

/// Values at one node as affine functions of a change `d` of the node
/// value, all other nodes frozen.
struct LocalNode {
    static constexpr int max_dirs = 16;
    std::size_t node = 0;
    double t0 = 0.0;
    double f = 0.0;
    Vec x;
    int dirs = 0;
    std::array<double, max_dirs> delta0{}, slope{};
    // One-sided axis differences D+ = dp0 + pp d, D- = dm0 + pm d and centred weights.
    std::array<double, 3> dp0{}, dm0{}, pp{}, pm{}, lp{}, lm{};
};

/// The monotone scheme for one problem on one grid: arms with boundary
/// handling resolved once, then cheap residual and node-local evaluation.
///
/// Dirichlet crossings shorten the arm to the boundary and use the datum
/// there; Neumann crossings reflect the far point across the tangent plane
/// and interpolate. Wedge nodes are pinned like Dirichlet nodes.
class Discretization {
public:
    Discretization(ProblemSpec problem, GridSpec grid, std::vector<NodeClass> cls, StencilSpec stencil = {},
                   Regularization reg = {})
        : problem_(std::move(problem)), grid_(std::move(grid)), cls_(std::move(cls)), stencil_(stencil), reg_(reg) {
        check_operator_constants(problem_.op);
        check_regularization(reg_, problem_.op.alpha);
        require(cls_.size() == grid_.size(), ErrorCode::UnclassifiedNode, "node classes do not cover the grid");
        require(problem_.domain.dim() == grid_.dim, ErrorCode::GridMismatch, "grid and domain dimensions differ");
        dirs_ = make_direction_set(grid_.dim, stencil_);
        frame_count_ = problem_.op.a == problem_.op.big_a && problem_.op.is_pucci() ? 1 : dirs_.frames.size();
        used_dirs_ = frame_count_ == 1 && problem_.op.is_pucci() ? grid_.dim : static_cast<int>(dirs_.dirs.size());
        slot_.assign(grid_.size(), -1);
        pinned_value_.assign(grid_.size(), 0.0);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (is_pinned(cls_[i])) {
                pinned_value_[i] = problem_.dirichlet_value(grid_.coord(i));
                require(std::isfinite(pinned_value_[i]), ErrorCode::InvalidArgument, "Dirichlet datum is not finite");
            } else if (is_active(cls_[i])) {
                slot_[i] = static_cast<int>(active_.size());
                active_.push_back(i);
            }
        }
        f_.resize(active_.size());
        arms_.resize(active_.size() * dirs_.dirs.size() * 2);
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const Vec x = grid_.coord(active_[a]);
            f_[a] = problem_.f(x);
            require(std::isfinite(f_[a]), ErrorCode::InvalidArgument, "source is not finite at a node");
            for (std::size_t k = 0; k < dirs_.dirs.size(); ++k) {
                Arm& up = arm(a, k, 0);
                Arm& dn = arm(a, k, 1);
                build_arm(active_[a], dirs_.dirs[k], +1, up);
                build_arm(active_[a], dirs_.dirs[k], -1, dn);
                const double h2v = grid_.h * grid_.h * dirs_.norm2(static_cast<int>(k));
                up.coef = 2.0 / ((up.s + dn.s) * up.s * h2v);
                dn.coef = 2.0 / ((up.s + dn.s) * dn.s * h2v);
            }
        }
    }

    static Discretization on_grid(const ProblemSpec& problem, double h, StencilSpec stencil = {},
                                  Regularization reg = {}) {
        GridSpec g = GridSpec::covering(problem.domain.box_lo(), problem.domain.box_hi(), h);
        auto cls = classify_nodes(problem.domain, g);
        return Discretization(problem, std::move(g), std::move(cls), stencil, reg);
    }

    const ProblemSpec& problem() const { return problem_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<NodeClass>& classes() const { return cls_; }
    const StencilSpec& stencil() const { return stencil_; }
    const DirectionSet& directions() const { return dirs_; }
    const std::vector<std::size_t>& active_nodes() const { return active_; }
    double eps() const { return reg_.eps(grid_.h); }
    /// Custom operators are discretized through an assembled Hessian, which is not monotone.
    bool experimental() const { return !problem_.op.is_pucci(); }

    GridField make_field(double init = 0.0) const {
        GridField u(grid_, cls_, init);
        apply_boundary(u);
        return u;
    }

    /// Pins Dirichlet and wedge nodes to the datum.
    void apply_boundary(GridField& u) const {
        require(u.node_class.size() == grid_.size() && u.grid.same_as(grid_), ErrorCode::UnclassifiedNode,
                "field is not classified on this grid");
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.node_class[i] != cls_[i]) fail(ErrorCode::UnclassifiedNode, "node class differs from the plan");
            if (is_pinned(cls_[i])) u[i] = pinned_value_[i];
        }
    }

    /// Far value of arm `side` (0: +v, 1: -v) of direction k at an active node:
    /// a neighbour, a reflected ghost value or a boundary datum.
    double arm_value(const GridField& u, std::size_t node, int k, int side) const {
        const int a = slot_of(node);
        return eval_arm(u, arm(a, k, side));
    }

    double arm_fraction(std::size_t node, int k, int side) const { return arm(slot_of(node), k, side).s; }

    LocalNode local(const GridField& u, std::size_t node) const {
        const int a = slot_of(node);
        LocalNode L;
        L.node = node;
        L.t0 = u[node];
        L.f = f_[a];
        L.x = grid_.coord(node);
        L.dirs = used_dirs_;
        for (int k = 0; k < L.dirs; ++k) {
            const Arm& up = arm(a, k, 0);
            const Arm& dn = arm(a, k, 1);
            const double vu = eval_arm(u, up), vd = eval_arm(u, dn);
            L.delta0[k] = up.coef * (vu - L.t0) + dn.coef * (vd - L.t0);
            L.slope[k] = up.coef * (1.0 - up.self_weight) + dn.coef * (1.0 - dn.self_weight);
            if (k < grid_.dim) {
                const double h = grid_.h;
                L.dp0[k] = (vu - L.t0) / (up.s * h);
                L.dm0[k] = (L.t0 - vd) / (dn.s * h);
                L.pp[k] = -(1.0 - up.self_weight) / (up.s * h);
                L.pm[k] = (1.0 - dn.self_weight) / (dn.s * h);
                L.lp[k] = dn.s / (up.s + dn.s);
                L.lm[k] = up.s / (up.s + dn.s);
            }
        }
        return L;
    }

    Vec local_gradient(const LocalNode& L, double d = 0.0) const {
        Vec g(grid_.dim);
        for (int i = 0; i < grid_.dim; ++i) {
            const double dp = L.dp0[i] + L.pp[i] * d, dm = L.dm0[i] + L.pm[i] * d;
            if (stencil_.grad_mode == GradMode::Centered) {
                g[i] = L.lp[i] * dp + L.lm[i] * dm;
            } else {
                const double fwd = std::min(dp, 0.0), bwd = std::max(dm, 0.0);
                g[i] = bwd >= -fwd ? bwd : fwd;
            }
        }
        return g;
    }

    /// |grad_h u|_eps^alpha at the node.
    double gradient_factor(const LocalNode& L, double d = 0.0) const {
        const double alpha = problem_.op.alpha;
        if (alpha == 0.0) return 1.0;
        const Vec g = local_gradient(L, d);
        const double e = eps();
        const double q = dot(g, g) + e * e;
        return alpha == 1.0 ? std::sqrt(q) : std::pow(q, 0.5 * alpha);
    }

    /// F_h after a change d of the node value; `dslope` receives dF_h/dd
    /// (one-sided, from the active frame) for Pucci operators.
    double local_operator(const LocalNode& L, double d, double* dslope = nullptr) const {
        const OperatorSpec& op = problem_.op;
        if (op.is_pucci()) {
            const bool plus = op.kind == OperatorKind::PucciPlus;
            double best = plus ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
            double best_slope = 0.0;
            for (std::size_t f = 0; f < frame_count_; ++f) {
                double s = 0.0, ds = 0.0;
                for (int k : dirs_.frames[f]) {
                    const double delta = L.delta0[k] - L.slope[k] * d;
                    s += detail::pucci_combine(plus, op.a, op.big_a, delta);
                    // Derivative on the side d moves towards: use the larger constant at a kink.
                    const double c = delta > 0.0 ? (plus ? op.big_a : op.a)
                                                 : (delta < 0.0 ? (plus ? op.a : op.big_a) : op.big_a);
                    ds -= c * L.slope[k];
                }
                if (plus ? s > best : s < best) {
                    best = s;
                    best_slope = ds;
                }
            }
            if (dslope) *dslope = best_slope;
            return best;
        }
        const int n = grid_.dim;
        SymMatrix m(n);
        auto delta = [&](int k) { return L.delta0[k] - L.slope[k] * d; };
        for (int i = 0; i < n; ++i) {
            m.set(i, i, delta(i));
            for (int j = i + 1; j < n; ++j)
                m.set(i, j, 0.5 * (delta(dirs_.diag_plus[i][j]) - delta(dirs_.diag_minus[i][j])));
        }
        if (dslope) {
            double sum = 0.0;
            for (int k = 0; k < L.dirs; ++k) sum += L.slope[k];
            *dslope = -op.a * sum;
        }
        return op(L.x, local_gradient(L, d), m);
    }

    /// |grad u|_eps^alpha F_h - beta(u) + f after a change d of the node value.
    double local_residual(const LocalNode& L, double d, double* dslope = nullptr) const {
        double fs = 0.0;
        const double alpha = problem_.op.alpha;
        double g = 1.0, gs = 0.0;
        if (alpha != 0.0) {
            const Vec p = local_gradient(L, d);
            const double e = eps();
            const double q = dot(p, p) + e * e;
            g = alpha == 1.0 ? std::sqrt(q) : std::pow(q, 0.5 * alpha);
            if (dslope && stencil_.grad_mode == GradMode::Centered) {
                double pq = 0.0;
                for (int i = 0; i < grid_.dim; ++i) pq += p[i] * (L.lp[i] * L.pp[i] + L.lm[i] * L.pm[i]);
                gs = alpha * g / q * pq;
            }
        }
        const double F = local_operator(L, d, dslope ? &fs : nullptr);
        const double t = L.t0 + d;
        if (dslope) *dslope = g * fs + gs * F - problem_.beta.derivative(t);
        return g * F - problem_.beta(t) + L.f;
    }

    double node_residual(const GridField& u, std::size_t node) const { return local_residual(local(u, node), 0.0); }

    /// Residual on the whole grid: zero at pinned nodes, NaN outside.
    GridField residual(const GridField& u) const {
        check_layout(u);
        GridField r(grid_, cls_, 0.0);
        for (std::size_t i : active_) r[i] = node_residual(u, i);
        return r;
    }

    /// Max |residual| over active nodes, with the worst node.
    std::pair<double, std::size_t> residual_norm(const GridField& u) const {
        check_layout(u);
        double m = 0.0;
        std::size_t at = active_.empty() ? 0 : active_.front();
        for (std::size_t i : active_) {
            const double r = std::abs(node_residual(u, i));
            if (!(r <= m)) {
                m = r;
                at = i;
                if (std::isnan(r)) break;
            }
        }
        return {m, at};
    }

    /// Bound on -d(residual)/d(u_i) without the beta term.
    double diagonal_bound(const LocalNode& L) const {
        double best = 0.0;
        if (problem_.op.is_pucci()) {
            for (std::size_t f = 0; f < frame_count_; ++f) {
                double s = 0.0;
                for (int k : dirs_.frames[f]) s += L.slope[k];
                best = std::max(best, s);
            }
        } else {
            for (int k = 0; k < L.dirs; ++k) best += L.slope[k];
        }
        return problem_.op.big_a * best;
    }

    /// Local explicit step h^2 / (2 A n_dirs g + h lip_p g + h^2 beta'_loc), also
    /// capped by the actual diagonal weight so that shortened arms stay monotone.
    double stable_dt(const GridField& u, std::size_t node) const {
        const LocalNode L = local(u, node);
        return stable_dt(L);
    }

    double stable_dt(const LocalNode& L) const {
        const double h = grid_.h;
        const double g = gradient_factor(L);
        const double t = L.t0;
        const double w = 1e-2 * (1.0 + std::abs(t));
        const double bprime = std::max({problem_.beta.secant(t - w, t), problem_.beta.secant(t, t + w), 0.0});
        const double nd = static_cast<double>(dirs_.dirs.size());
        const double formula =
            h * h / (2.0 * problem_.op.big_a * nd * g + h * problem_.op.lip_p * g + h * h * bprime);
        return std::min(formula, 1.0 / (g * diagonal_bound(L) + bprime));
    }

    void check_layout(const GridField& u) const {
        require(u.grid.same_as(grid_) && u.node_class == cls_, ErrorCode::GridMismatch,
                "field does not live on the discretization grid");
    }

private:
    Arm& arm(std::size_t a, std::size_t k, int side) { return arms_[(a * dirs_.dirs.size() + k) * 2 + side]; }
    const Arm& arm(std::size_t a, std::size_t k, int side) const {
        return arms_[(a * dirs_.dirs.size() + k) * 2 + side];
    }

    int slot_of(std::size_t node) const {
        require(node < slot_.size() && slot_[node] >= 0, ErrorCode::InvalidArgument,
                "node " + std::to_string(node) + " carries no equation");
        return slot_[node];
    }

    double eval_arm(const GridField& u, const Arm& a) const {
        double v = a.constant;
        for (std::uint32_t e = a.begin; e < a.begin + a.count; ++e) v += entries_[e].weight * u[entries_[e].node];
        return v;
    }

    void build_arm(std::size_t node, const Offset& o, int sign, Arm& out) {
        const auto m = grid_.multi(node);
        const std::array<int, 3> q{m[0] + sign * o[0], m[1] + sign * o[1], m[2] + sign * o[2]};
        out.begin = static_cast<std::uint32_t>(entries_.size());
        if (grid_.in_range(q) && cls_[grid_.index(q[0], q[1], q[2])] != NodeClass::Exterior) {
            add_entry(out, node, grid_.index(q[0], q[1], q[2]), 1.0);
            return;
        }
        const DomainSpec& dom = problem_.domain;
        const Vec x = grid_.coord(node);
        Vec v(grid_.dim);
        for (int i = 0; i < grid_.dim; ++i) v[i] = sign * grid_.h * o[i];
        const auto cr = dom.first_exit(x, v);
        require(cr.has_value(), ErrorCode::MissingNeighbor, "stencil arm leaves the grid inside the domain");
        const BoundaryPiece& piece = dom.pieces()[cr->piece];
        if (piece.kind == BoundaryKind::Dirichlet) {
            out.s = std::max(cr->s, 1e-2);
            out.constant = problem_.dirichlet_value(cr->point);
            require(std::isfinite(out.constant), ErrorCode::InvalidArgument, "Dirichlet datum is not finite");
            return;
        }
        Vec y = reflect(x + v, cr->point, dom.inward_normal(piece, cr->point));
        for (int it = 0; it < 3 && !dom.contains(y, 1e-9 * grid_.h); ++it) {
            const auto nb = dom.nearest_boundary(y);
            const BoundaryPiece& p2 = dom.pieces()[nb.piece];
            if (p2.kind != BoundaryKind::Neumann) break;
            y = reflect(y, nb.point, dom.inward_normal(p2, nb.point));
        }
        interpolate(node, y, out);
    }

    static Vec reflect(const Vec& y, const Vec& on_plane, const Vec& normal) {
        return y - (2.0 * dot(y - on_plane, normal)) * normal;
    }

    void add_entry(Arm& out, std::size_t self, std::size_t j, double w) {
        entries_.push_back({static_cast<std::uint32_t>(j), w});
        ++out.count;
        if (j == self) out.self_weight += w;
    }

    /// Multilinear interpolation over the non-exterior corners of the cell
    /// containing y; the nearest usable node when none is available.
    void interpolate(std::size_t self, const Vec& y, Arm& out) {
        const int n = grid_.dim;
        std::array<int, 3> base{0, 0, 0};
        std::array<double, 3> t{0.0, 0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            double xi = (y[i] - grid_.lo[i]) / grid_.h;
            const double r = std::round(xi);
            if (std::abs(xi - r) < 1e-9) xi = r;
            base[i] = std::clamp(static_cast<int>(std::floor(xi)), 0, grid_.n[i] - 2);
            t[i] = std::clamp(xi - base[i], 0.0, 1.0);
        }
        std::vector<std::pair<std::size_t, double>> w;
        double total = 0.0;
        for (int c = 0; c < (1 << n); ++c) {
            std::array<int, 3> q = base;
            double wc = 1.0;
            for (int i = 0; i < n; ++i) {
                const int bit = (c >> i) & 1;
                q[i] += bit;
                wc *= bit ? t[i] : 1.0 - t[i];
            }
            if (wc <= 1e-14) continue;
            const std::size_t j = grid_.index(q[0], q[1], q[2]);
            if (cls_[j] == NodeClass::Exterior) continue;
            w.emplace_back(j, wc);
            total += wc;
        }
        if (total > 1e-12) {
            for (auto& [j, wc] : w) add_entry(out, self, j, wc / total);
            return;
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = grid_.size();
        for (int c = 0; c < (n == 2 ? 9 : 27); ++c) {
            std::array<int, 3> q{0, 0, 0};
            int r = c;
            for (int i = 0; i < n; ++i) {
                q[i] = static_cast<int>(std::round((y[i] - grid_.lo[i]) / grid_.h)) + r % 3 - 1;
                r /= 3;
            }
            if (!grid_.in_range(q)) continue;
            const std::size_t j = grid_.index(q[0], q[1], q[2]);
            if (cls_[j] == NodeClass::Exterior) continue;
            const double dd = norm(grid_.coord(j) - y);
            if (dd < best) {
                best = dd;
                pick = j;
            }
        }
        require(pick < grid_.size(), ErrorCode::MissingNeighbor, "no node near a reflected arm");
        add_entry(out, self, pick, 1.0);
    }

    ProblemSpec problem_;
    GridSpec grid_;
    std::vector<NodeClass> cls_;
    StencilSpec stencil_;
    Regularization reg_;
    DirectionSet dirs_;
    std::size_t frame_count_ = 1;
    int used_dirs_ = 0;  // directions read by local(): the axes when only the axis frame is used
    std::vector<int> slot_;
    std::vector<std::size_t> active_;
    std::vector<double> pinned_value_;
    std::vector<double> f_;
    std::vector<Arm> arms_;
    std::vector<ArmEntry> entries_;
};

/// Pins Dirichlet and wedge nodes; Neumann ghost values are resolved per
/// arm by the discretization (see Discretization::arm_value).
inline GridField apply_boundary(GridField field, const ProblemSpec& problem) {
    require(field.node_class.size() == field.grid.size() && !field.node_class.empty(), ErrorCode::UnclassifiedNode,
            "field has no node classes");
    for (std::size_t i = 0; i < field.size(); ++i)
        if (is_pinned(field.node_class[i])) field[i] = problem.dirichlet_value(field.coord(i));
    return field;
}

/// |grad_h u|_eps^alpha F_h(x, grad_h u, D^2_h u) - beta(u) + f at active nodes.
inline GridField residual(const GridField& field, const ProblemSpec& problem, const StencilSpec& stencil = {},
                          const Regularization& reg = {}) {
    const Discretization disc(problem, field.grid, field.node_class, stencil, reg);
    return disc.residual(field);
}

} // namespace mixedbvp
