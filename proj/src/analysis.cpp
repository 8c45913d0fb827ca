#include "pgfem/analysis.hpp"

#include "pgfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace pgfem {

ErrorReport error_norms(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                        const Eigen::VectorXd& nodal, const std::optional<ExactSolution>& exact,
                        const ErrorOptions& options) {
    if (!exact) throw Error(ErrorCode::MissingExact, "error norms need an exact solution");
    if (static_cast<std::size_t>(nodal.size()) != dofmap.n_nodes())
        throw Error(ErrorCode::DimensionMismatch, "nodal vector does not cover all nodes");
    const int degree = options.quadrature_degree >= 0 ? options.quadrature_degree : 2 * dofmap.k + 4;
    const TriangleRule& rule = rule_for_degree(degree);

    double grad2 = 0.0, l2 = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto T = mesh.corners(t);
        const double area = triangle_area(T);
        const auto& globals = dofmap.element_to_global[t];
        Eigen::VectorXd local(globals.size());
        for (std::size_t i = 0; i < globals.size(); ++i) local[i] = nodal[globals[i]];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = barycentric_to_point(T, rule.points[q]);
            if (options.restrict_to && classify_point(*options.restrict_to, x, 0.0) == PointClass::outside) continue;
            const double uh = bases[t].values(x).dot(local);
            const Eigen::MatrixX2d g = bases[t].gradients(x);
            const Point guh(g.col(0).dot(local), g.col(1).dot(local));
            const double w = rule.weights[q] * area;
            l2 += w * std::pow(exact->value(x) - uh, 2);
            grad2 += w * (exact->gradient(x) - guh).squaredNorm();
        }
    }

    ErrorReport report;
    report.grad_err = std::sqrt(grad2);
    report.l2_err = std::sqrt(l2);
    for (int node : dofmap.node_of_unknown)
        report.max_unknown_err =
            std::max(report.max_unknown_err, std::abs(exact->value(dofmap.node_coords[node]) - nodal[node]));
    report.max_nodal_err = report.max_unknown_err;
    for (std::size_t n = 0; n < dofmap.n_nodes(); ++n)
        report.max_nodal_err =
            std::max(report.max_nodal_err, std::abs(exact->value(dofmap.node_coords[n]) - nodal[n]));
    for (const auto& b : bases) {
        if (!b.shifted) continue;
        const auto& standard = b.reference.nodes();
        const auto& globals = dofmap.element_to_global[b.element_id];
        for (std::size_t i = 0; i < globals.size(); ++i)
            if (standard[i] != b.nodes[i])
                report.max_nodal_err =
                    std::max(report.max_nodal_err, std::abs(exact->value(standard[i]) - nodal[globals[i]]));
    }
    report.h = mesh.n_triangles() ? mesh_stats(mesh).h : 0.0;
    return report;
}

Eigen::VectorXd interpolate_Ih(const ScalarField& u, const DofMap& dofmap) {
    Eigen::VectorXd nodal(dofmap.n_nodes());
    for (std::size_t n = 0; n < dofmap.n_nodes(); ++n) nodal[n] = u(dofmap.node_coords[n]);
    return nodal;
}

double observed_order(double coarse, double fine) {
    // Errors at round-off level carry no rate information.
    constexpr double floor = 1e-12;
    if (!(coarse > floor) || !(fine > floor)) return kNaN;
    return std::log2(coarse / fine);
}

ConvergenceTable convergence_orders(const std::vector<ErrorReport>& reports) {
    ConvergenceTable table;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        ConvergenceRow row;
        row.errors = reports[i];
        if (i > 0) {
            const auto& prev = reports[i - 1];
            if (reports[i].param != 2 * prev.param)
                throw Error(ErrorCode::NonDyadicSequence, "parameter " + std::to_string(reports[i].param) +
                                                              " does not double " + std::to_string(prev.param));
            row.grad_order = observed_order(prev.grad_err, reports[i].grad_err);
            row.l2_order = observed_order(prev.l2_err, reports[i].l2_err);
            row.max_order = observed_order(prev.max_nodal_err, reports[i].max_nodal_err);
        }
        table.rows.push_back(row);
    }
    return table;
}

KtReport kt_perturbation_report(const TriMesh& mesh, const std::vector<LocalBasis>& bases) {
    KtReport report;
    for (const auto& b : bases) {
        if (!b.shifted) continue;
        report.max_dev = std::max(report.max_dev, b.kt_deviation);
        report.dev_vs_h.emplace_back(mesh.h_per_element[b.element_id], b.kt_deviation);
    }
    return report;
}

double inf_sup_estimate(const SparseMatrix& A, const SparseMatrix& G_test, const SparseMatrix& G_trial,
                        std::size_t max_unknowns) {
    const auto n = A.rows();
    if (A.cols() != n || G_test.rows() != n || G_trial.rows() != n)
        throw Error(ErrorCode::DimensionMismatch, "inf-sup operands have inconsistent sizes");
    if (static_cast<std::size_t>(n) > max_unknowns)
        throw Error(ErrorCode::TooLargeForDense,
                    std::to_string(n) + " unknowns exceed the dense limit of " + std::to_string(max_unknowns));
    if (n == 0) return kNaN;

    const Eigen::LLT<Eigen::MatrixXd> test_llt{Eigen::MatrixXd(G_test)};
    const Eigen::LLT<Eigen::MatrixXd> trial_llt{Eigen::MatrixXd(G_trial)};
    if (test_llt.info() != Eigen::Success || trial_llt.info() != Eigen::Success)
        throw Error(ErrorCode::NotSPD, "Gram matrix is not positive definite");

    // M = L_test^-1 A L_trial^-T
    Eigen::MatrixXd M = test_llt.matrixL().solve(Eigen::MatrixXd(A));
    M = trial_llt.matrixL().solve(M.transpose()).transpose();
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()[n - 1];
}

namespace {

std::string fmt(double v, const char* spec = "%.6e") {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

void write_table_csv(std::ostream& out, const ConvergenceTable& table) {
    out << "param,h,grad_err,grad_order,l2_err,l2_order,max_err,max_order,alpha_h,kt_dev\n";
    for (const auto& r : table.rows) {
        const auto& e = r.errors;
        out << e.param << ',' << fmt(e.h, "%.10e") << ',' << fmt(e.grad_err, "%.10e") << ','
            << fmt(r.grad_order, "%.6f") << ',' << fmt(e.l2_err, "%.10e") << ',' << fmt(r.l2_order, "%.6f") << ','
            << fmt(e.max_nodal_err, "%.10e") << ',' << fmt(r.max_order, "%.6f") << ','
            << fmt(r.diagnostics.alpha_h, "%.10e") << ',' << fmt(r.diagnostics.kt_dev, "%.10e") << '\n';
    }
}

void write_table_markdown(std::ostream& out, const ConvergenceTable& table, const std::string& param_name,
                          const std::string& title) {
    out << "### " << title << "\n\n| " << param_name << " |";
    for (const auto& r : table.rows) out << ' ' << r.errors.param << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < table.rows.size(); ++i) out << "---|";
    out << '\n';
    auto line = [&](const char* label, auto value, auto order) {
        out << "| " << label << " |";
        for (const auto& r : table.rows) out << ' ' << fmt(value(r), "%.6E") << " |";
        out << "\n| order |";
        for (const auto& r : table.rows) out << ' ' << fmt(order(r), "%.3f") << " |";
        out << '\n';
    };
    line("grad error", [](const ConvergenceRow& r) { return r.errors.grad_err; },
         [](const ConvergenceRow& r) { return r.grad_order; });
    line("L2 error", [](const ConvergenceRow& r) { return r.errors.l2_err; },
         [](const ConvergenceRow& r) { return r.l2_order; });
    line("max nodal error", [](const ConvergenceRow& r) { return r.errors.max_nodal_err; },
         [](const ConvergenceRow& r) { return r.max_order; });
}

}  // namespace pgfem
