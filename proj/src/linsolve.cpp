#include "pgfem/linsolve.hpp"

#include <Eigen/SparseLU>

namespace pgfem {

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = A * x - b;
    const double bn = b.norm();
    return bn > 0.0 ? r.norm() / bn : r.norm();
}

SolveReport solve(const SparseMatrix& A, const Eigen::VectorXd& b, double tol) {
    if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    if (A.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side size does not match");

    SolveReport report;
    report.method = "sparse-lu";
    if (A.rows() == 0) {
        report.x = Eigen::VectorXd(0);
        return report;
    }

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::SingularMatrix, "sparse LU factorization failed: " + lu.lastErrorMessage());
    report.factor_nonzeros = lu.nnzL() + lu.nnzU();

    report.x = lu.solve(b);
    report.residual_norm = relative_residual(A, report.x, b);
    while (report.residual_norm > tol && report.refinement_steps < 3) {
        const Eigen::VectorXd r = b - A * report.x;
        report.x += lu.solve(r);
        report.residual_norm = relative_residual(A, report.x, b);
        ++report.refinement_steps;
    }
    if (!std::isfinite(report.residual_norm) || report.residual_norm > tol)
        throw Error(ErrorCode::SingularMatrix,
                    "residual " + std::to_string(report.residual_norm) + " exceeds the contract after refinement");
    return report;
}

}  // namespace pgfem
