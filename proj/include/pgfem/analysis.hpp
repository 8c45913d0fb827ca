#pragma once

#include "pgfem/assembly.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace pgfem {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ErrorReport {
    double grad_err = 0.0;       // ||grad(u - u_h)|| in L2 over the triangulated domain
    double l2_err = 0.0;         // ||u - u_h|| in L2 over the triangulated domain
    /// max |u - u_h| over the Lagrange nodes of the straight mesh. A node M on
    /// a boundary chord carries the value stored at its shifted image P, so
    /// the entry there is |u(M) - d(P)|.
    double max_nodal_err = 0.0;
    double max_unknown_err = 0.0;  // max over unknown nodes only
    double h = 0.0;
    int param = 0;               // J (ellipse) or I (annulus)
};

struct ErrorOptions {
    int quadrature_degree = -1;  // -1: 2k + 4
    /// Skip quadrature points outside the physical domain, i.e. measure over
    /// the intersection of the triangulation with the domain.
    const BoundaryGeometry* restrict_to = nullptr;
};

/// `nodal` holds values at every global node (see expand_solution).
ErrorReport error_norms(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                        const Eigen::VectorXd& nodal, const std::optional<ExactSolution>& exact,
                        const ErrorOptions& options = {});

/// Nodal interpolant in the trial space: u sampled at every global node,
/// including the shifted boundary nodes.
Eigen::VectorXd interpolate_Ih(const ScalarField& u, const DofMap& dofmap);

struct Diagnostics {
    double alpha_h = kNaN;
    double kt_dev = kNaN;
};

struct ConvergenceRow {
    ErrorReport errors;
    double grad_order = kNaN;
    double l2_order = kNaN;
    double max_order = kNaN;
    Diagnostics diagnostics;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Orders log2(err_prev / err_cur) between consecutive entries, whose
/// parameters must double. A single entry yields NaN orders.
ConvergenceTable convergence_orders(const std::vector<ErrorReport>& reports);

double observed_order(double coarse, double fine);

struct KtReport {
    double max_dev = 0.0;
    std::vector<std::pair<double, double>> dev_vs_h;  // (h_T, ||K~ - I||_max) per shifted element
};

KtReport kt_perturbation_report(const TriMesh& mesh, const std::vector<LocalBasis>& bases);

inline constexpr std::size_t kMaxDenseInfSup = 5000;

/// Smallest singular value of L_test^-1 A L_trial^-T with G = L L^T, i.e. the
/// discrete inf-sup constant of the bilinear form in the gradient norms.
double inf_sup_estimate(const SparseMatrix& A, const SparseMatrix& G_test, const SparseMatrix& G_trial,
                        std::size_t max_unknowns = kMaxDenseInfSup);

/// Header: param,h,grad_err,grad_order,l2_err,l2_order,max_err,max_order,alpha_h,kt_dev
void write_table_csv(std::ostream& out, const ConvergenceTable& table);
void write_table_markdown(std::ostream& out, const ConvergenceTable& table, const std::string& param_name,
                          const std::string& title);

}  // namespace pgfem
