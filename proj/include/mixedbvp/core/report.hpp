#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mixedbvp/core/grid.hpp"

namespace mixedbvp {

/// Outcome of an iterative solve. `converged == false` carries the best
/// iterate found together with the reason in `status`.
struct SolveReport {
    long iterations = 0;
    std::vector<double> residual_history;
    double final_residual = 0.0;
    GridField field;
    long clamp_activations = 0;
    bool converged = false;
    std::string status = "not_started";
    std::string method;
    std::string label = "iterate";
    double tol = 0.0;
    double omega = 1.0;
    std::size_t worst_node = 0;
    bool experimental = false;

    /// Every entry of the last `window` is at most the maximum of the
    /// `window` entries before it.
    bool trailing_window_decreasing(std::size_t window = 10) const {
        const auto& r = residual_history;
        if (r.size() < 2 * window || window == 0) return true;
        const auto mid = r.end() - static_cast<long>(window);
        const double prev = *std::max_element(mid - static_cast<long>(window), mid);
        return std::all_of(mid, r.end(), [&](double v) { return v <= prev; });
    }
};

} // namespace mixedbvp
