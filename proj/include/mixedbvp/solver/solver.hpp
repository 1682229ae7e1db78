#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/core/problem.hpp"
#include "mixedbvp/core/report.hpp"
#include "mixedbvp/scheme/discretization.hpp"

namespace mixedbvp {

enum class SolveMethod { PseudoTime, GaussSeidel };

constexpr std::string_view to_string(SolveMethod m) {
    return m == SolveMethod::PseudoTime ? "pseudo_time" : "gauss_seidel";
}

/// Envelope [lower, upper] each iterate is projected into.
struct ClampPair {
    GridField lower;
    GridField upper;
};

struct SolveOptions {
    double h = 1.0 / 32.0;
    /// Negative: 1e-8 (1 + sup |f|).
    double tol = -1.0;
    long max_iters = 1000000;
    StencilSpec stencil;
    Regularization reg;
    std::optional<ClampPair> clamp;
    SolveMethod method = SolveMethod::PseudoTime;
    /// Over-relaxation for Gauss-Seidel; 0 picks 2 / (1 + pi h sqrt(N) / diam).
    double omega = 0.0;
    /// Halve omega - 1 when over-relaxation stops making progress.
    bool adaptive_omega = true;
    long stall_window = 10000;
    double stall_reduction = 1e-3;
    std::optional<GridField> initial;
};

/// Per-node explicit steps (zero at nodes without an equation).
inline GridField stable_dt(const Discretization& disc, const GridField& u) {
    disc.check_layout(u);
    GridField dt(disc.grid(), disc.classes(), 0.0);
    for (std::size_t i : disc.active_nodes()) dt[i] = disc.stable_dt(u, i);
    return dt;
}

inline GridField stable_dt(const GridField& u, const ProblemSpec& problem, const StencilSpec& stencil = {},
                           const Regularization& reg = {}) {
    return stable_dt(Discretization(problem, u.grid, u.node_class, stencil, reg), u);
}

/// u_i <- u_i + dt_i R_i(u) at active nodes, reading only the old field.
inline GridField pseudo_time_step(const Discretization& disc, const GridField& u, double* residual_norm = nullptr) {
    disc.check_layout(u);
    GridField next = u;
    double rmax = 0.0;
    for (std::size_t i : disc.active_nodes()) {
        const LocalNode L = disc.local(u, i);
        const double r = disc.local_residual(L, 0.0);
        const double v = u[i] + disc.stable_dt(L) * r;
        if (!std::isfinite(v)) {
            const Vec x = u.coord(i);
            std::string where = "(" + std::to_string(x[0]);
            for (int k = 1; k < x.dim(); ++k) where += ", " + std::to_string(x[k]);
            fail(ErrorCode::NonFiniteUpdate, "non-finite update at node " + std::to_string(i) + " " + where + ")");
        }
        next[i] = v;
        rmax = std::max(rmax, std::abs(r));
    }
    if (residual_norm) *residual_norm = rmax;
    return next;
}

inline GridField pseudo_time_step(const GridField& u, const ProblemSpec& problem, const StencilSpec& stencil = {},
                                  const Regularization& reg = {}) {
    return pseudo_time_step(Discretization(problem, u.grid, u.node_class, stencil, reg), u);
}

namespace detail {

/// Bisection on the side opposite to the Newton direction, used when the
/// gradient factor makes the node residual non-monotone.
inline double opposite_root(const Discretization& disc, const LocalNode& L, double r0, double tol_abs) {
    double step = -(r0 > 0.0 ? 1.0 : -1.0) * 1e-6 * (1.0 + std::abs(L.t0));
    double a = 0.0, b = step, rb = disc.local_residual(L, b);
    for (int it = 0; it < 60 && rb * r0 > 0.0; ++it) {
        a = b;
        step *= 2.0;
        b = a + step;
        rb = disc.local_residual(L, b);
    }
    if (rb * r0 > 0.0 || !std::isfinite(rb)) return 0.0;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double rm = disc.local_residual(L, m);
        if (std::abs(rm) <= tol_abs || std::abs(b - a) <= 1e-15 * (1.0 + std::abs(L.t0))) return m;
        (rm * r0 > 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

/// Root of the node residual in the node value: Newton steps safeguarded
/// by a bracket grown from the first Newton guess.
inline double solve_node(const Discretization& disc, const LocalNode& L, double tol_abs, double* residual0 = nullptr) {
    double s0 = 0.0;
    const double r0 = disc.local_residual(L, 0.0, &s0);
    if (residual0) *residual0 = r0;
    if (std::abs(r0) <= tol_abs) return 0.0;
    const double fallback = -(disc.gradient_factor(L) * disc.diagonal_bound(L) + 1e-300);
    const double sgn = r0 > 0.0 ? 1.0 : -1.0;
    double step = s0 < 0.0 ? -r0 / s0 : -r0 / fallback;
    double a = 0.0, ra = r0;
    double b = step, rb = 0.0, sb = 0.0;
    for (int it = 0;; ++it) {
        rb = disc.local_residual(L, b, &sb);
        if (std::abs(rb) <= tol_abs) return b;
        if (rb * sgn < 0.0) break;
        if (it == 60 || !std::isfinite(rb)) return opposite_root(disc, L, r0, tol_abs);
        a = b;
        ra = rb;
        step *= 2.0;
        b = a + step;
    }
    double x = b, rx = rb, sx = sb;
    for (int it = 0; it < 80; ++it) {
        double xn = sx < 0.0 ? x - rx / sx : 0.5 * (a + b);
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (a + b);
        if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(L.t0) + std::abs(x))) return xn;
        x = xn;
        rx = disc.local_residual(L, x, &sx);
        if (std::abs(rx) <= tol_abs) return x;
        if (rx * ra > 0.0) {
            a = x;
            ra = rx;
        } else {
            b = x;
        }
    }
    return x;
}

/// 2 / (1 + pi h sqrt(N) / diam) for linear problems; closer to 1 when the
/// frame switches or the gradient factor make the node map nonlinear.
inline double auto_omega(const Discretization& disc) {
    const double diam = disc.problem().domain.diameter();
    const double n = static_cast<double>(disc.grid().dim);
    const double w = 2.0 / (1.0 + std::numbers::pi * disc.grid().h * std::sqrt(n) / diam);
    const OperatorSpec& op = disc.problem().op;
    if (op.alpha != 0.0) return 1.0 + 0.1 * (w - 1.0);
    if (!op.is_pucci() || op.a != op.big_a) return 1.0 + 0.7 * (w - 1.0);
    return w;
}

inline long project(GridField& u, std::size_t i, const std::optional<ClampPair>& clamp) {
    if (!clamp) return 0;
    const double lo = clamp->lower[i], hi = clamp->upper[i];
    if (u[i] < lo) {
        u[i] = lo;
        return 1;
    }
    if (u[i] > hi) {
        u[i] = hi;
        return 1;
    }
    return 0;
}

} // namespace detail

/// Iterates to ||R||_inf < tol (or max_iters / a stall). Pseudo-time is an
/// explicit monotone relaxation; Gauss-Seidel solves each node exactly in
/// red-black order with optional over-relaxation. A clamp pair turns the
/// iteration into the Perron-clamped surrogate.
inline SolveReport solve(const Discretization& disc, const SolveOptions& opts) {
    const ProblemSpec& pb = disc.problem();
    double fsup = 0.0;
    for (std::size_t i : disc.active_nodes()) fsup = std::max(fsup, std::abs(pb.f(disc.grid().coord(i))));
    const double tol = opts.tol > 0.0 ? opts.tol : 1e-8 * (1.0 + fsup);
    require(opts.max_iters > 0, ErrorCode::InvalidArgument, "max_iters must be positive");

    SolveReport rep;
    rep.tol = tol;
    rep.method = std::string(to_string(opts.method));
    rep.experimental = disc.experimental();
    GridField u = disc.make_field(0.0);
    if (opts.clamp) {
        disc.check_layout(opts.clamp->lower);
        disc.check_layout(opts.clamp->upper);
        for (std::size_t i = 0; i < u.size(); ++i)
            require(u.node_class[i] == NodeClass::Exterior || opts.clamp->lower[i] <= opts.clamp->upper[i],
                    ErrorCode::PreconditionFailed, "clamp lower exceeds upper at node " + std::to_string(i));
        for (std::size_t i : disc.active_nodes()) u[i] = opts.clamp->lower[i];
        rep.label = "Perron-clamped iterate";
    }
    if (opts.initial) {
        disc.check_layout(*opts.initial);
        for (std::size_t i : disc.active_nodes()) u[i] = (*opts.initial)[i];
        for (std::size_t i : disc.active_nodes()) detail::project(u, i, opts.clamp);
    }

    std::vector<std::size_t> colored[2];
    for (std::size_t i : disc.active_nodes()) {
        const auto m = disc.grid().multi(i);
        colored[(m[0] + m[1] + m[2]) % 2].push_back(i);
    }
    double omega = opts.method == SolveMethod::GaussSeidel ? (opts.omega > 0.0 ? opts.omega : detail::auto_omega(disc))
                                                           : 1.0;
    require(omega > 0.0 && omega < 2.0, ErrorCode::InvalidArgument, "omega must lie in (0, 2)");

    GridField best = u;
    double best_r = std::numeric_limits<double>::infinity();
    long since_best = 0;
    rep.status = "max_iters";
    const bool gs = opts.method == SolveMethod::GaussSeidel;
    // Gauss-Seidel records the residual each node had just before its update
    // and confirms convergence with the true residual.
    double sweep_r = std::numeric_limits<double>::infinity();
    for (long it = 0; it < opts.max_iters; ++it) {
        double r = sweep_r;
        std::size_t at = 0;
        if (!gs || it == 0 || sweep_r < tol) std::tie(r, at) = disc.residual_norm(u);
        if (!std::isfinite(r)) fail(ErrorCode::NonFiniteUpdate, "non-finite residual at node " + std::to_string(at));
        rep.residual_history.push_back(r);
        rep.iterations = it;
        if (r < best_r) {
            best_r = r;
            best = u;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (r < tol) {
            std::tie(r, at) = disc.residual_norm(u);
            rep.residual_history.back() = r;
            rep.worst_node = at;
            if (r < tol) {
                rep.converged = true;
                rep.status = "converged";
                break;
            }
        }
        const auto n = static_cast<long>(rep.residual_history.size());
        if (n > opts.stall_window &&
            r > (1.0 - opts.stall_reduction) * rep.residual_history[n - 1 - opts.stall_window]) {
            rep.status = "stalled";
            break;
        }
        if (!gs) {
            u = pseudo_time_step(disc, u);
            for (std::size_t i : disc.active_nodes()) rep.clamp_activations += detail::project(u, i, opts.clamp);
            continue;
        }
        if (opts.adaptive_omega && omega > 1.0 && (r > 1e3 * best_r || since_best > 100)) {
            // Over-relaxation is cycling for this nonlinearity: back off.
            omega = 1.0 + 0.5 * (omega - 1.0);
            if (omega < 1.05) omega = 1.0;
            u = best;
            since_best = 0;
        }
        const double node_tol = 1e-3 * tol;
        sweep_r = 0.0;
        for (const auto& nodes : colored) {
            for (std::size_t i : nodes) {
                const LocalNode L = disc.local(u, i);
                double r0 = 0.0;
                const double d = detail::solve_node(disc, L, node_tol, &r0);
                sweep_r = std::max(sweep_r, std::abs(r0));
                const double v = L.t0 + omega * d;
                if (!std::isfinite(v))
                    fail(ErrorCode::NonFiniteUpdate, "non-finite update at node " + std::to_string(i));
                u[i] = v;
                rep.clamp_activations += detail::project(u, i, opts.clamp);
            }
        }
    }
    rep.omega = omega;
    if (rep.converged) {
        rep.field = std::move(u);
        rep.final_residual = rep.residual_history.back();
    } else {
        std::tie(rep.final_residual, rep.worst_node) = disc.residual_norm(best);
        rep.field = std::move(best);
    }
    return rep;
}

inline SolveReport solve(const ProblemSpec& problem, const SolveOptions& opts = {}) {
    const ProblemSpec checked = validate_problem(problem);
    return solve(Discretization::on_grid(checked, opts.h, opts.stencil, opts.reg), opts);
}

struct VanishingOptions {
    std::vector<int> schedule{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    /// Successive sup-norm difference at which the sequence is declared converged.
    double tol = 1e-4;
    bool stop_early = true;
    double growth_limit = 4.0;
    SolveOptions solve;
};

struct VanishingReport {
    std::vector<int> n_values;
    std::vector<double> sup_norms;
    /// differences[k] = ||u_{n_k} - u_{n_{k-1}}||_inf, k >= 1 (entry 0 is 0).
    std::vector<double> differences;
    std::vector<bool> solves_converged;
    bool cauchy = false;
    SolveReport last;
    long total_iterations = 0;
};

/// Solves -|grad u|^alpha F + |u|^alpha u / n = f for n along the schedule
/// (beta must be zero in the input), warm-starting each solve from the last.
inline VanishingReport solve_vanishing_zero_order(const ProblemSpec& problem, const VanishingOptions& opts = {}) {
    require(problem.beta.is_zero(), ErrorCode::PreconditionFailed, "the vanishing sequence needs beta = 0");
    require(problem.op.homogeneous, ErrorCode::PreconditionFailed,
            "the operator is not declared positively 1-homogeneous");
    require(!opts.schedule.empty(), ErrorCode::InvalidArgument, "empty n schedule");
    for (std::size_t k = 0; k < opts.schedule.size(); ++k)
        require(opts.schedule[k] > 0 && (k == 0 || opts.schedule[k] > opts.schedule[k - 1]),
                ErrorCode::InvalidArgument, "n schedule must be positive and increasing");

    VanishingReport rep;
    std::optional<GridField> prev;
    for (int n : opts.schedule) {
        ProblemSpec pn = problem;
        pn.beta = Beta::power(problem.op.alpha + 1.0, 1.0 / n);
        SolveOptions so = opts.solve;
        if (prev) so.initial = *prev;
        SolveReport r = solve(pn, so);
        rep.total_iterations += r.iterations;
        const double sup = r.field.sup_norm();
        const double diff = prev ? sup_difference(r.field, *prev) : 0.0;
        if (!rep.sup_norms.empty() && rep.sup_norms.back() > 0.0 && sup > opts.growth_limit * rep.sup_norms.back())
            fail(ErrorCode::SequenceDiverging, "sup norm grew from " + std::to_string(rep.sup_norms.back()) + " to " +
                                                   std::to_string(sup) + " at n = " + std::to_string(n));
        rep.n_values.push_back(n);
        rep.sup_norms.push_back(sup);
        rep.differences.push_back(diff);
        rep.solves_converged.push_back(r.converged);
        prev = r.field;
        rep.last = std::move(r);
        if (rep.n_values.size() > 1 && diff < opts.tol) {
            rep.cauchy = true;
            if (opts.stop_early) break;
        } else {
            rep.cauchy = false;
        }
    }
    return rep;
}

} // namespace mixedbvp
