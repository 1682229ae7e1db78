#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixedbvp {

enum class ErrorCode {
    InvalidEllipticity,
    InvalidAlpha,
    NonMonotoneBeta,
    InvalidArgument,
    NonSmoothPoint,
    NotOnBoundary,
    OriginUndefined,
    SingularJacobian,
    KappaUnattainable,
    Overflow,
    OutsidePatch,
    ComplexRoots,
    NoAdmissibleGamma,
    DegenerateEllipticity,
    OriginSingularity,
    OutsideSector,
    AxisSingularity,
    NonClassicalSample,
    MissingNeighbor,
    UnclassifiedNode,
    NonFiniteUpdate,
    NotConverged,
    SequenceDiverging,
    PreconditionFailed,
    GridMismatch,
    InsufficientRadii,
    ConfigParse,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidEllipticity: return "InvalidEllipticity";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::NonMonotoneBeta: return "NonMonotoneBeta";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSmoothPoint: return "NonSmoothPoint";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::OriginUndefined: return "OriginUndefined";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::KappaUnattainable: return "KappaUnattainable";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OutsidePatch: return "OutsidePatch";
    case ErrorCode::ComplexRoots: return "ComplexRoots";
    case ErrorCode::NoAdmissibleGamma: return "NoAdmissibleGamma";
    case ErrorCode::DegenerateEllipticity: return "DegenerateEllipticity";
    case ErrorCode::OriginSingularity: return "OriginSingularity";
    case ErrorCode::OutsideSector: return "OutsideSector";
    case ErrorCode::AxisSingularity: return "AxisSingularity";
    case ErrorCode::NonClassicalSample: return "NonClassicalSample";
    case ErrorCode::MissingNeighbor: return "MissingNeighbor";
    case ErrorCode::UnclassifiedNode: return "UnclassifiedNode";
    case ErrorCode::NonFiniteUpdate: return "NonFiniteUpdate";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SequenceDiverging: return "SequenceDiverging";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientRadii: return "InsufficientRadii";
    case ErrorCode::ConfigParse: return "ConfigParse";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code; every module throws this.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace mixedbvp
