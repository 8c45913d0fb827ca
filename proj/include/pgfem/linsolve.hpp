#pragma once

#include "pgfem/assembly.hpp"

#include <string>

namespace pgfem {

struct SolveReport {
    Eigen::VectorXd x;
    double residual_norm = 0.0;  // ||Ax - b|| / ||b|| (absolute when b = 0)
    std::string method;
    int refinement_steps = 0;
    Eigen::Index factor_nonzeros = 0;
};

inline constexpr double kResidualContract = 1e-10;

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Sparse LU with partial pivoting (COLAMD ordering) followed by up to three
/// steps of iterative refinement. Single-threaded and deterministic.
SolveReport solve(const SparseMatrix& A, const Eigen::VectorXd& b, double tol = kResidualContract);

}  // namespace pgfem
