#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "mixedbvp/analysis/refinement.hpp"
#include "mixedbvp/analysis/regularity.hpp"
#include "mixedbvp/barriers/types.hpp"
#include "mixedbvp/core/report.hpp"
#include "mixedbvp/solver/solver.hpp"

namespace mixedbvp {

using Json = nlohmann::ordered_json;

/// Non-finite values become null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json json_vec(const Vec& x) {
    Json a = Json::array();
    for (int i = 0; i < x.dim(); ++i) a.push_back(json_number(x[i]));
    return a;
}

template <class Seq>
Json json_numbers(const Seq& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

/// The field itself goes to CSV; only its grid is described here.
inline Json to_json(const SolveReport& r) {
    Json j;
    j["converged"] = r.converged;
    j["status"] = r.status;
    j["method"] = r.method;
    j["label"] = r.label;
    j["iterations"] = r.iterations;
    j["final_residual"] = json_number(r.final_residual);
    j["tol"] = json_number(r.tol);
    j["omega"] = json_number(r.omega);
    j["clamp_activations"] = r.clamp_activations;
    j["experimental"] = r.experimental;
    j["h"] = json_number(r.field.grid.h);
    j["nodes"] = r.field.size();
    if (r.field.size() > r.worst_node)
        j["worst_node"] = {{"index", r.worst_node}, {"x", json_vec(r.field.coord(r.worst_node))}};
    j["residual_history_length"] = r.residual_history.size();
    return j;
}

inline Json to_json(const BarrierCertificate& c) {
    Json j;
    j["barrier"] = c.barrier;
    j["sample_count"] = c.sample_count;
    j["min_margin_interior"] = json_number(c.min_margin_interior);
    j["min_margin_boundary"] = json_number(c.min_margin_boundary);
    j["min_margin_value"] = json_number(c.min_margin_value);
    j["passed"] = c.passed;
    j["witness"] = c.witness ? json_vec(*c.witness) : Json(nullptr);
    j["witness_kind"] = c.witness_kind;
    return j;
}

inline Json to_json(const HolderFit& f) {
    Json j;
    j["center"] = json_vec(f.center);
    j["gamma_hat"] = json_number(f.gamma_hat);
    j["c_hat"] = json_number(f.c_hat);
    j["fit_residual"] = json_number(f.fit_residual);
    j["degenerate"] = f.degenerate;
    j["radii_used"] = json_numbers(f.radii_used);
    j["annulus_max"] = json_numbers(f.annulus_max);
    return j;
}

inline Json to_json(const ModulusReport& m) {
    Json j;
    j["mode"] = std::string(to_string(m.mode));
    j["gamma"] = json_number(m.gamma);
    j["lipschitz_M"] = json_number(m.lipschitz_m);
    j["holder_M"] = json_number(m.holder_m);
    j["max_gap"] = json_number(m.max_gap);
    j["pairs"] = m.pairs;
    j["max_offset_exponent"] = m.max_offset_exponent;
    j["node_stride"] = m.node_stride;
    return j;
}

inline Json to_json(const RefinementTable& t) {
    Json j;
    j["complete"] = t.complete;
    j["cauchy_shrinking"] = t.cauchy_shrinking();
    if (!t.complete) j["error"] = {{"code", std::string(to_string(*t.error_code))}, {"message", t.error}};
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json row;
        row["h"] = json_number(r.h);
        row["sup_diff_to_finest"] = json_number(r.sup_diff_to_finest);
        row["diff_to_next"] = json_number(r.diff_to_next);
        row["holder_M"] = json_number(r.holder_m);
        row["error_to_exact"] = json_number(r.error_to_exact);
        row["converged"] = r.converged;
        row["iterations"] = r.iterations;
        row["final_residual"] = json_number(r.final_residual);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

inline Json to_json(const VanishingReport& v) {
    Json j;
    j["cauchy"] = v.cauchy;
    j["total_iterations"] = v.total_iterations;
    j["n_values"] = v.n_values;
    j["sup_norms"] = json_numbers(v.sup_norms);
    j["differences"] = json_numbers(v.differences);
    Json conv = Json::array();
    for (bool b : v.solves_converged) conv.push_back(b);
    j["solves_converged"] = conv;
    return j;
}

} // namespace mixedbvp
