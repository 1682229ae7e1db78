#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/linalg.hpp"

namespace mixedbvp {

enum class BoundaryKind { Dirichlet, Neumann };
enum class BoundaryLabel { Dirichlet, Neumann, Wedge };
enum class ShapeKind { Rectangle, Disk, DiskSector, HalfDisk };

constexpr std::string_view to_string(BoundaryKind k) {
    return k == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
}

constexpr std::string_view to_string(BoundaryLabel k) {
    switch (k) {
    case BoundaryLabel::Dirichlet: return "dirichlet";
    case BoundaryLabel::Neumann: return "neumann";
    case BoundaryLabel::Wedge: return "wedge";
    }
    return "?";
}

constexpr std::string_view to_string(ShapeKind k) {
    switch (k) {
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Disk: return "disk";
    case ShapeKind::DiskSector: return "disk_sector";
    case ShapeKind::HalfDisk: return "half_disk";
    }
    return "?";
}

/// Angle in [0, 2 pi): arccos(x/r) for y >= 0, 2 pi - arccos(x/r) otherwise.
inline double polar_angle(double x, double y) {
    const double r = std::hypot(x, y);
    require(r > 0.0, ErrorCode::OriginUndefined, "polar angle undefined at the origin");
    const double c = std::clamp(x / r, -1.0, 1.0);
    return y >= 0.0 ? std::acos(c) : 2.0 * std::numbers::pi - std::acos(c);
}

/// One smooth piece of the boundary carrying a single condition.
struct BoundaryPiece {
    enum class Type { Segment, Arc, Face };

    Type type = Type::Segment;
    BoundaryKind kind = BoundaryKind::Dirichlet;
    std::string name;

    // Segment (2-D): p0 -> p1 with fixed inward normal.
    Vec p0, p1, inward;
    // Arc (2-D): centre, radius, counter-clockwise angular range [angle0, angle0 + sweep].
    Vec center;
    double radius = 0.0;
    double angle0 = 0.0;
    double sweep = 0.0;
    // Face (3-D box): coordinate `axis` fixed at `level`; inward sign along that axis.
    int axis = 0;
    double level = 0.0;
    double inward_sign = 1.0;
};

struct NearestPoint {
    double distance = 0.0;
    Vec point;
    /// True when the nearest point on this piece is not unique (arc centre).
    bool degenerate = false;
};

/// Signed distance (positive inside), its gradient and the nearest piece.
struct DistanceInfo {
    double d = 0.0;
    Vec grad_d;
    Vec nearest;
    int piece = -1;
    bool non_smooth = false;
};

struct Crossing {
    double s = 1.0;  // fraction of the arm travelled before leaving
    Vec point;
    int piece = -1;
};

/// A canonical domain with its boundary partition into Dirichlet and
/// Neumann pieces. The Dirichlet set is closed: junction points belong
/// to it and are reported as wedge points.
class DomainSpec {
public:
    /// 2-D: kinds ordered {xmin, xmax, ymin, ymax}; 3-D adds {zmin, zmax}.
    static DomainSpec rectangle(const Vec& lo, const Vec& hi, std::vector<BoundaryKind> kinds = {}) {
        const int n = lo.dim();
        require(hi.dim() == n, ErrorCode::InvalidArgument, "rectangle corners differ in dimension");
        for (int i = 0; i < n; ++i)
            require(hi[i] > lo[i], ErrorCode::InvalidArgument, "rectangle extents must be positive");
        if (kinds.empty()) kinds.assign(2 * n, BoundaryKind::Dirichlet);
        require(static_cast<int>(kinds.size()) == 2 * n, ErrorCode::InvalidArgument,
                "rectangle needs one boundary kind per side");

        DomainSpec d(ShapeKind::Rectangle, n);
        d.lo_ = lo;
        d.hi_ = hi;
        d.side_kinds_ = kinds;
        static constexpr std::array<const char*, 6> names{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
        if (n == 2) {
            const Vec a{lo[0], lo[1]}, b{hi[0], lo[1]}, c{hi[0], hi[1]}, e{lo[0], hi[1]};
            d.add_segment(e, a, {1.0, 0.0}, kinds[0], names[0]);
            d.add_segment(b, c, {-1.0, 0.0}, kinds[1], names[1]);
            d.add_segment(a, b, {0.0, 1.0}, kinds[2], names[2]);
            d.add_segment(c, e, {0.0, -1.0}, kinds[3], names[3]);
        } else {
            for (int k = 0; k < 6; ++k) {
                BoundaryPiece p;
                p.type = BoundaryPiece::Type::Face;
                p.kind = kinds[k];
                p.name = names[k];
                p.axis = k / 2;
                p.level = (k % 2 == 0) ? lo[p.axis] : hi[p.axis];
                p.inward_sign = (k % 2 == 0) ? 1.0 : -1.0;
                d.pieces_.push_back(p);
            }
        }
        return d;
    }

    static DomainSpec disk(double radius, BoundaryKind kind = BoundaryKind::Dirichlet) {
        require(radius > 0.0, ErrorCode::InvalidArgument, "disk radius must be positive");
        DomainSpec d(ShapeKind::Disk, 2);
        d.radius_ = radius;
        d.lo_ = Vec{-radius, -radius};
        d.hi_ = Vec{radius, radius};
        d.add_arc(radius, 0.0, 2.0 * std::numbers::pi, kind, "arc");
        return d;
    }

    /// {r < radius, 0 < theta < theta1}. Default partition: Dirichlet on
    /// the theta = 0 ray and the arc, Neumann on the theta = theta1 ray.
    static DomainSpec disk_sector(double radius, double theta1,
                                  BoundaryKind ray0 = BoundaryKind::Dirichlet,
                                  BoundaryKind ray1 = BoundaryKind::Neumann,
                                  BoundaryKind arc = BoundaryKind::Dirichlet) {
        require(radius > 0.0, ErrorCode::InvalidArgument, "sector radius must be positive");
        require(theta1 > 0.0 && theta1 < 2.0 * std::numbers::pi, ErrorCode::InvalidArgument,
                "sector angle must lie in (0, 2 pi)");
        DomainSpec d(ShapeKind::DiskSector, 2);
        d.radius_ = radius;
        d.theta1_ = theta1;
        d.init_sector(ray0, ray1, arc);
        return d;
    }

    static DomainSpec half_disk(double radius, BoundaryKind ray0 = BoundaryKind::Dirichlet,
                                BoundaryKind ray_pi = BoundaryKind::Neumann,
                                BoundaryKind arc = BoundaryKind::Dirichlet) {
        DomainSpec d = disk_sector(radius, std::numbers::pi, ray0, ray_pi, arc);
        d.shape_ = ShapeKind::HalfDisk;
        return d;
    }

    ShapeKind shape() const { return shape_; }
    int dim() const { return dim_; }
    double radius() const { return radius_; }
    double sector_angle() const { return theta1_; }
    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }
    const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
    const std::vector<BoundaryKind>& side_kinds() const { return side_kinds_; }

    double diameter() const { return norm(hi_ - lo_); }

    bool convex() const {
        return shape_ != ShapeKind::DiskSector || theta1_ <= std::numbers::pi + 1e-15;
    }

    /// Radius of the uniform exterior sphere condition (infinite for convex shapes).
    double exterior_radius() const {
        return convex() ? std::numeric_limits<double>::infinity() : 0.0;
    }

    bool has_kind(BoundaryKind k) const {
        return std::any_of(pieces_.begin(), pieces_.end(), [k](const BoundaryPiece& p) { return p.kind == k; });
    }

    /// Exact membership in the closed domain.
    bool contains_exact(const Vec& x) const {
        switch (shape_) {
        case ShapeKind::Rectangle:
            for (int i = 0; i < dim_; ++i)
                if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
            return true;
        case ShapeKind::Disk: return std::hypot(x[0], x[1]) <= radius_;
        case ShapeKind::DiskSector:
        case ShapeKind::HalfDisk: {
            const double r = std::hypot(x[0], x[1]);
            if (r > radius_) return false;
            if (r == 0.0) return true;
            if (shape_ == ShapeKind::HalfDisk) return x[1] >= 0.0;
            return polar_angle(x[0], x[1]) <= theta1_;
        }
        }
        return false;
    }

    /// Membership in the closed domain, widened by `tol`.
    bool contains(const Vec& x, double tol = 1e-12) const {
        if (contains_exact(x)) return true;
        return nearest_boundary(x).distance <= tol;
    }

    NearestPoint nearest_on_piece(const BoundaryPiece& p, const Vec& x) const {
        NearestPoint np;
        switch (p.type) {
        case BoundaryPiece::Type::Segment: {
            const Vec e = p.p1 - p.p0;
            const double t = std::clamp(dot(x - p.p0, e) / dot(e, e), 0.0, 1.0);
            np.point = p.p0 + t * e;
            break;
        }
        case BoundaryPiece::Type::Arc: {
            const Vec rel = x - p.center;
            const double r = norm(rel);
            if (r == 0.0) {
                np.degenerate = true;
                np.point = p.center + p.radius * Vec{std::cos(p.angle0), std::sin(p.angle0)};
                break;
            }
            const double phi = polar_angle(rel[0], rel[1]);
            if (angle_in_arc(p, phi, 0.0)) {
                np.point = p.center + (p.radius / r) * rel;
            } else {
                const Vec e0 = arc_point(p, p.angle0);
                const Vec e1 = arc_point(p, p.angle0 + p.sweep);
                np.point = norm(x - e0) <= norm(x - e1) ? e0 : e1;
            }
            break;
        }
        case BoundaryPiece::Type::Face: {
            np.point = x;
            for (int i = 0; i < dim_; ++i) np.point[i] = std::clamp(x[i], lo_[i], hi_[i]);
            np.point[p.axis] = p.level;
            break;
        }
        }
        np.distance = norm(x - np.point);
        return np;
    }

    /// Inward unit normal of a piece at a point on it.
    Vec inward_normal(const BoundaryPiece& p, const Vec& on_piece) const {
        switch (p.type) {
        case BoundaryPiece::Type::Segment: return p.inward;
        case BoundaryPiece::Type::Arc: {
            Vec n = p.center - on_piece;
            return n * (1.0 / norm(n));
        }
        case BoundaryPiece::Type::Face: {
            Vec n(dim_);
            n[p.axis] = p.inward_sign;
            return n;
        }
        }
        return Vec(dim_);
    }

    struct NearestBoundary {
        double distance = std::numeric_limits<double>::infinity();
        Vec point;
        int piece = -1;
        bool tie = false;
        bool degenerate = false;
    };

    NearestBoundary nearest_boundary(const Vec& x) const {
        NearestBoundary best;
        for (int k = 0; k < static_cast<int>(pieces_.size()); ++k) {
            const NearestPoint np = nearest_on_piece(pieces_[k], x);
            const double tol = 1e-12 * (1.0 + np.distance);
            if (np.distance < best.distance - tol) {
                const bool keep_tie = false;
                best = NearestBoundary{np.distance, np.point, k, keep_tie, np.degenerate};
            } else if (np.distance <= best.distance + tol) {
                // Same distance: a genuine tie only if the nearest points differ.
                if (norm(np.point - best.point) > 1e-12 * (1.0 + diameter())) best.tie = true;
                if (pieces_[k].kind == BoundaryKind::Dirichlet && pieces_[best.piece].kind != BoundaryKind::Dirichlet)
                    best.piece = k;
            }
        }
        return best;
    }

    /// Points of D intersected with the closure of N (2-D: junctions of pieces).
    std::vector<Vec> wedge_points() const {
        std::vector<Vec> out;
        if (dim_ != 2) return out;
        const double tol = 1e-12 * (1.0 + diameter());
        for (const auto& p : pieces_) {
            if (p.kind != BoundaryKind::Dirichlet) continue;
            for (const Vec& e : endpoints(p)) {
                bool touches_neumann = false;
                for (const auto& q : pieces_)
                    if (q.kind == BoundaryKind::Neumann && nearest_on_piece(q, e).distance <= tol)
                        touches_neumann = true;
                if (!touches_neumann) continue;
                const bool seen = std::any_of(out.begin(), out.end(),
                                              [&](const Vec& w) { return norm(w - e) <= tol; });
                if (!seen) out.push_back(e);
            }
        }
        return out;
    }

    /// Distance to the Dirichlet (resp. Neumann) part of the boundary.
    double distance_to_kind(const Vec& x, BoundaryKind kind) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pieces_)
            if (p.kind == kind) best = std::min(best, nearest_on_piece(p, x).distance);
        return best;
    }

    /// First point where the segment x -> x + v leaves the closed domain.
    /// Returns nothing when the whole segment stays inside. Crossings at a
    /// junction prefer the Dirichlet piece.
    std::optional<Crossing> first_exit(const Vec& x, const Vec& v) const {
        std::optional<Crossing> best;
        const double len = norm(v);
        const double step = 1e-9;
        auto consider = [&](double s, int k) {
            if (s < -1e-12 || s > 1.0 + 1e-12) return;
            s = std::clamp(s, 0.0, 1.0);
            const Vec at = x + s * v;
            if (nearest_on_piece(pieces_[k], at).distance > 1e-10 * (1.0 + len)) return;
            if (contains_exact(x + (s + step) * v)) return;
            if (!best || s < best->s - 1e-12 ||
                (s <= best->s + 1e-12 && pieces_[k].kind == BoundaryKind::Dirichlet &&
                 pieces_[best->piece].kind != BoundaryKind::Dirichlet)) {
                best = Crossing{s, at, k};
            }
        };

        for (int k = 0; k < static_cast<int>(pieces_.size()); ++k) {
            const BoundaryPiece& p = pieces_[k];
            switch (p.type) {
            case BoundaryPiece::Type::Segment: {
                const Vec e = p.p1 - p.p0;
                const double det = v[0] * (-e[1]) - v[1] * (-e[0]);
                if (std::abs(det) < 1e-300) break;
                const Vec rhs = p.p0 - x;
                const double s = (rhs[0] * (-e[1]) - rhs[1] * (-e[0])) / det;
                consider(s, k);
                break;
            }
            case BoundaryPiece::Type::Arc: {
                const Vec w = x - p.center;
                const double qa = dot(v, v);
                const double qb = 2.0 * dot(w, v);
                const double qc = dot(w, w) - p.radius * p.radius;
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc < 0.0) break;
                const double sq = std::sqrt(disc);
                consider((-qb - sq) / (2.0 * qa), k);
                consider((-qb + sq) / (2.0 * qa), k);
                break;
            }
            case BoundaryPiece::Type::Face: {
                if (v[p.axis] == 0.0) break;
                consider((p.level - x[p.axis]) / v[p.axis], k);
                break;
            }
            }
        }
        if (!best && !contains_exact(x + v)) {
            // Exit through a piece endpoint missed by round-off: fall back to bisection.
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (contains_exact(x + mid * v) ? lo : hi) = mid;
            }
            const Vec at = x + lo * v;
            best = Crossing{lo, at, nearest_boundary(at).piece};
        }
        return best;
    }

private:
    DomainSpec(ShapeKind s, int dim) : shape_(s), dim_(dim), lo_(dim), hi_(dim) {}

    void add_segment(const Vec& a, const Vec& b, const Vec& inward, BoundaryKind kind, std::string name) {
        BoundaryPiece p;
        p.type = BoundaryPiece::Type::Segment;
        p.kind = kind;
        p.name = std::move(name);
        p.p0 = a;
        p.p1 = b;
        p.inward = inward * (1.0 / norm(inward));
        pieces_.push_back(p);
    }

    void add_arc(double radius, double angle0, double sweep, BoundaryKind kind, std::string name) {
        BoundaryPiece p;
        p.type = BoundaryPiece::Type::Arc;
        p.kind = kind;
        p.name = std::move(name);
        p.center = Vec{0.0, 0.0};
        p.radius = radius;
        p.angle0 = angle0;
        p.sweep = sweep;
        pieces_.push_back(p);
    }

    void init_sector(BoundaryKind ray0, BoundaryKind ray1, BoundaryKind arc) {
        const double r = radius_;
        const Vec origin{0.0, 0.0};
        const Vec end0{r, 0.0};
        const Vec dir1{std::cos(theta1_), std::sin(theta1_)};
        const Vec end1 = r * dir1;
        add_segment(origin, end0, {0.0, 1.0}, ray0, "ray0");
        add_segment(origin, end1, {std::sin(theta1_), -std::cos(theta1_)}, ray1, "ray1");
        add_arc(r, 0.0, theta1_, arc, "arc");
        side_kinds_ = {ray0, ray1, arc};

        lo_ = Vec{r, 0.0};
        hi_ = Vec{r, 0.0};
        auto grow = [&](const Vec& q) {
            for (int i = 0; i < 2; ++i) {
                lo_[i] = std::min(lo_[i], q[i]);
                hi_[i] = std::max(hi_[i], q[i]);
            }
        };
        grow(origin);
        grow(end1);
        for (int q = 1; q < 4; ++q) {
            const double ang = q * 0.5 * std::numbers::pi;
            if (ang <= theta1_) grow(r * Vec{std::cos(ang), std::sin(ang)});
        }
        // Exact zeros matter for grid alignment.
        for (int i = 0; i < 2; ++i) {
            if (std::abs(lo_[i]) < 1e-14 * r) lo_[i] = 0.0;
            if (std::abs(hi_[i]) < 1e-14 * r) hi_[i] = 0.0;
        }
    }

    static Vec arc_point(const BoundaryPiece& p, double ang) {
        return p.center + p.radius * Vec{std::cos(ang), std::sin(ang)};
    }

    static bool angle_in_arc(const BoundaryPiece& p, double phi, double tol) {
        if (p.sweep >= 2.0 * std::numbers::pi - 1e-15) return true;
        double rel = phi - p.angle0;
        rel = std::fmod(rel, 2.0 * std::numbers::pi);
        if (rel < 0.0) rel += 2.0 * std::numbers::pi;
        return rel <= p.sweep + tol || rel >= 2.0 * std::numbers::pi - tol;
    }

    std::vector<Vec> endpoints(const BoundaryPiece& p) const {
        switch (p.type) {
        case BoundaryPiece::Type::Segment: return {p.p0, p.p1};
        case BoundaryPiece::Type::Arc:
            if (p.sweep >= 2.0 * std::numbers::pi - 1e-15) return {};
            return {arc_point(p, p.angle0), arc_point(p, p.angle0 + p.sweep)};
        case BoundaryPiece::Type::Face: return {};
        }
        return {};
    }

    ShapeKind shape_;
    int dim_;
    Vec lo_, hi_;
    double radius_ = 0.0;
    double theta1_ = 0.0;
    std::vector<BoundaryPiece> pieces_;
    std::vector<BoundaryKind> side_kinds_;
};

/// Signed distance to the boundary and its gradient. On N the outward
/// normal is -grad_d. Points equidistant from two boundary pieces (or the
/// centre of a disk) come back with `non_smooth` set and an arbitrary
/// subgradient.
inline DistanceInfo distance_and_normal(const DomainSpec& domain, const Vec& x) {
    const auto nb = domain.nearest_boundary(x);
    DistanceInfo info;
    const bool inside = domain.contains_exact(x);
    info.d = inside ? nb.distance : -nb.distance;
    info.nearest = nb.point;
    info.piece = nb.piece;
    info.non_smooth = nb.tie || nb.degenerate;
    const Vec rel = x - nb.point;
    const double r = norm(rel);
    if (r > 1e-14 * (1.0 + domain.diameter())) {
        info.grad_d = (inside ? 1.0 : -1.0) / r * rel;
    } else {
        info.grad_d = domain.inward_normal(domain.pieces()[nb.piece], nb.point);
    }
    return info;
}

/// Hessian of the distance function at an interior point where it is smooth.
inline SymMatrix distance_hessian(const DomainSpec& domain, const Vec& x) {
    const auto nb = domain.nearest_boundary(x);
    const int n = domain.dim();
    SymMatrix h(n);
    const Vec rel = x - nb.point;
    const double r = norm(rel);
    if (r == 0.0) return h;
    const BoundaryPiece& p = domain.pieces()[nb.piece];
    const Vec u = (1.0 / r) * rel;
    SymMatrix proj = SymMatrix::identity(n) - SymMatrix::outer(u);
    if (p.type == BoundaryPiece::Type::Arc) {
        const Vec w = x - p.center;
        const double rho = norm(w);
        const Vec on_circle = p.center + (p.radius / rho) * w;
        if (norm(on_circle - nb.point) <= 1e-12 * (1.0 + p.radius)) {
            // d = R - |x - c| inside the disk.
            const Vec uw = (1.0 / rho) * w;
            return -(1.0 / rho) * (SymMatrix::identity(n) - SymMatrix::outer(uw));
        }
        return (1.0 / r) * proj;  // nearest point is an arc endpoint
    }
    if (p.type == BoundaryPiece::Type::Segment) {
        const Vec e = p.p1 - p.p0;
        const double t = dot(nb.point - p.p0, e) / dot(e, e);
        if (t > 1e-12 && t < 1.0 - 1e-12) return h;
        return (1.0 / r) * proj;  // nearest point is a vertex
    }
    // Face: distance is affine unless the nearest point sits on an edge of the box.
    int clamped = 0;
    for (int i = 0; i < n; ++i)
        if (i != p.axis && (nb.point[i] == domain.box_lo()[i] || nb.point[i] == domain.box_hi()[i]) &&
            nb.point[i] != x[i])
            ++clamped;
    return clamped == 0 ? h : (1.0 / r) * proj;
}

/// Boundary label of a point on the boundary. Wedge when the point lies
/// within `tol` of both the Dirichlet and the Neumann part.
inline BoundaryLabel classify_boundary(const DomainSpec& domain, const Vec& x, double tol) {
    const auto nb = domain.nearest_boundary(x);
    require(nb.distance <= tol, ErrorCode::NotOnBoundary,
            "point is " + std::to_string(nb.distance) + " away from the boundary");
    const double dd = domain.distance_to_kind(x, BoundaryKind::Dirichlet);
    const double dn = domain.distance_to_kind(x, BoundaryKind::Neumann);
    if (dd <= tol && dn <= tol) {
        // Close to both parts: a wedge only if a junction is actually nearby.
        if (domain.dim() == 3) return BoundaryLabel::Wedge;
        for (const Vec& w : domain.wedge_points())
            if (norm(x - w) <= tol) return BoundaryLabel::Wedge;
    }
    return domain.pieces()[nb.piece].kind == BoundaryKind::Dirichlet ? BoundaryLabel::Dirichlet
                                                                     : BoundaryLabel::Neumann;
}

} // namespace mixedbvp
