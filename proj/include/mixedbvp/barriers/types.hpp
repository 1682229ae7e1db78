#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mixedbvp/core/linalg.hpp"

namespace mixedbvp {

/// Log-barrier regions relative to the level set {C d = kappa}.
enum class RegionTag { BelowKappa, AtKappa, AboveKappa, Smooth };

constexpr std::string_view to_string(RegionTag t) {
    switch (t) {
    case RegionTag::BelowKappa: return "below_kappa";
    case RegionTag::AtKappa: return "at_kappa";
    case RegionTag::AboveKappa: return "above_kappa";
    case RegionTag::Smooth: return "smooth";
    }
    return "?";
}

/// Value and closed-form derivatives of a barrier at one point.
struct BarrierEval {
    double value = 0.0;
    Vec gradient;
    SymMatrix hessian;
    RegionTag region_tag = RegionTag::Smooth;
    /// False on kinks where no C^2 test function touches from below.
    bool classical = true;
    /// Cylindrical barrier only: (1/C)(r^g + |x'|^2) <= w <= C(r^g + |x'|^2) at this point.
    bool sandwich_holds = true;
};

/// Sampled verification of a barrier's differential inequalities.
/// Margins are normalized by the power of r the inequality predicts, so
/// for the conical barrier they estimate the constant c directly.
struct BarrierCertificate {
    std::string barrier;
    int sample_count = 0;
    double min_margin_interior = 0.0;
    double min_margin_boundary = 0.0;
    /// min phi - 1/2 for the conical family; unused (+inf) for the log barrier.
    double min_margin_value = 0.0;
    bool passed = false;
    std::optional<Vec> witness;
    std::string witness_kind;
};

} // namespace mixedbvp
