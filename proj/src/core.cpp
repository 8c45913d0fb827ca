#include "pgfem/core.hpp"

namespace pgfem {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParam: return "InvalidParam";
        case ErrorCode::NoRootInBracket: return "NoRootInBracket";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::AmbiguousEdge: return "AmbiguousEdge";
        case ErrorCode::MeshAssumptionViolated: return "MeshAssumptionViolated";
        case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
        case ErrorCode::SingularLocalSystem: return "SingularLocalSystem";
        case ErrorCode::DuplicateNodeCollision: return "DuplicateNodeCollision";
        case ErrorCode::InconsistentDof: return "InconsistentDof";
        case ErrorCode::NotSPD: return "NotSPD";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingExact: return "MissingExact";
        case ErrorCode::NonDyadicSequence: return "NonDyadicSequence";
        case ErrorCode::TooLargeForDense: return "TooLargeForDense";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace pgfem
