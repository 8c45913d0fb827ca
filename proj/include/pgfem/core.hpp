#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pgfem {

using Point = Eigen::Vector2d;

enum class ErrorCode {
    InvalidParam,
    NoRootInBracket,
    NoConvergence,
    AmbiguousEdge,
    MeshAssumptionViolated,
    UnsupportedDegree,
    SingularLocalSystem,
    DuplicateNodeCollision,
    InconsistentDof,
    NotSPD,
    SingularMatrix,
    DimensionMismatch,
    MissingExact,
    NonDyadicSequence,
    TooLargeForDense,
    ParseError,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pgfem
