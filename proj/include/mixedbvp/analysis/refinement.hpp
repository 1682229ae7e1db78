#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixedbvp/analysis/regularity.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/solver/solver.hpp"

namespace mixedbvp {

struct RefinementOptions {
    SolveOptions solve;
    double gamma = 0.5;
    bool holder = true;
    /// Optional exact solution; fills error_to_exact per level.
    ScalarField exact;
};

struct RefinementRow {
    double h = 0.0;
    /// Sup over this level's nodes of |u_h - u_finest|.
    double sup_diff_to_finest = 0.0;
    /// Sup over this level's nodes of |u_h - u_{next finer}| (0 on the finest level).
    double diff_to_next = 0.0;
    double holder_m = 0.0;
    double error_to_exact = 0.0;
    bool converged = false;
    long iterations = 0;
    double final_residual = 0.0;
};

struct RefinementTable {
    std::vector<RefinementRow> rows;
    std::vector<GridField> fields;
    /// False when a level raised; `error` then names it and `rows` holds the
    /// levels solved before it.
    bool complete = true;
    std::string error;
    std::optional<ErrorCode> error_code;

    /// diff_to_next strictly decreases over the levels that have one.
    bool cauchy_shrinking() const {
        if (rows.size() < 3) return false;
        for (std::size_t k = 1; k + 1 < rows.size(); ++k)
            if (!(rows[k].diff_to_next < rows[k - 1].diff_to_next)) return false;
        return true;
    }
};

/// Sup of |coarse - fine| over coarse non-exterior nodes whose fine
/// counterpart is non-exterior. The grids must share their origin and the
/// spacing ratio must be an integer.
inline double restricted_sup_difference(const GridField& coarse, const GridField& fine) {
    require(coarse.grid.dim == fine.grid.dim, ErrorCode::GridMismatch, "grid dimensions differ");
    const double ratio = coarse.grid.h / fine.grid.h;
    const int r = static_cast<int>(std::lround(ratio));
    require(r >= 1 && std::abs(ratio - r) <= 1e-9 * ratio, ErrorCode::GridMismatch, "grids are not nested");
    for (int i = 0; i < coarse.grid.dim; ++i)
        require(std::abs(coarse.grid.lo[i] - fine.grid.lo[i]) <= 1e-12 * (1.0 + std::abs(fine.grid.lo[i])),
                ErrorCode::GridMismatch, "grids do not share their origin");
    double m = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        if (coarse.node_class[i] == NodeClass::Exterior) continue;
        const auto c = coarse.grid.multi(i);
        const std::array<int, 3> q{c[0] * r, c[1] * r, c[2] * r};
        if (!fine.grid.in_range(q)) continue;
        const std::size_t j = fine.grid.index(q[0], q[1], q[2]);
        if (fine.node_class[j] == NodeClass::Exterior) continue;
        m = std::max(m, std::abs(coarse[i] - fine[j]));
    }
    return m;
}

/// Solves on each h (strictly decreasing, nested, at least 3 levels) and
/// tabulates Cauchy differences and the Hoelder constant per level.
inline RefinementTable refinement_study(const ProblemSpec& problem, const std::vector<double>& h_list,
                                        const RefinementOptions& opts = {}) {
    require(h_list.size() >= 3, ErrorCode::PreconditionFailed, "refinement_study needs at least 3 grid spacings");
    for (std::size_t k = 1; k < h_list.size(); ++k) {
        require(h_list[k] < h_list[k - 1], ErrorCode::PreconditionFailed, "grid spacings must strictly decrease");
        const double ratio = h_list[k - 1] / h_list[k];
        require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, ErrorCode::PreconditionFailed,
                "grid spacings must be nested (integer ratios)");
    }

    RefinementTable table;
    for (double h : h_list) {
        SolveOptions so = opts.solve;
        so.h = h;
        so.initial.reset();
        so.clamp.reset();
        try {
            SolveReport r = solve(problem, so);
            RefinementRow row;
            row.h = h;
            row.converged = r.converged;
            row.iterations = r.iterations;
            row.final_residual = r.final_residual;
            if (opts.holder) row.holder_m = modulus_report(r.field, r.field, opts.gamma).holder_m;
            if (opts.exact) {
                for (std::size_t i = 0; i < r.field.size(); ++i)
                    if (r.field.node_class[i] != NodeClass::Exterior)
                        row.error_to_exact = std::max(row.error_to_exact, std::abs(r.field[i] - opts.exact(r.field.coord(i))));
            }
            table.rows.push_back(row);
            table.fields.push_back(std::move(r.field));
        } catch (const Error& e) {
            table.complete = false;
            table.error = "h = " + std::to_string(h) + ": " + e.what();
            table.error_code = e.code();
            break;
        }
    }
    const std::size_t n = table.rows.size();
    if (table.complete && n > 0) {
        const GridField& finest = table.fields.back();
        for (std::size_t k = 0; k + 1 < n; ++k) {
            table.rows[k].sup_diff_to_finest = restricted_sup_difference(table.fields[k], finest);
            table.rows[k].diff_to_next = restricted_sup_difference(table.fields[k], table.fields[k + 1]);
        }
    } else {
        for (std::size_t k = 0; k + 1 < n; ++k)
            table.rows[k].diff_to_next = restricted_sup_difference(table.fields[k], table.fields[k + 1]);
    }
    return table;
}

} // namespace mixedbvp
