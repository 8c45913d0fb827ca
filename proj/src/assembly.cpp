#include "pgfem/assembly.hpp"

#include "pgfem/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <charconv>
#include <ostream>
#include <string>

namespace pgfem {

double ProblemSpec::source(const Point& p) const {
    if (extension_mode == ExtensionMode::zero_outside && classify_point(geom, p, 1e-12) == PointClass::outside)
        return 0.0;
    return f(p);
}

QuadratureDegrees QuadratureDegrees::resolved(int k) const {
    return {stiffness >= 0 ? stiffness : 2 * (k - 1), load >= 0 ? load : 2 * k + 2, error >= 0 ? error : 2 * k + 4};
}

namespace {

void check_consistent(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases) {
    const int n_k = SpaceSpec::for_degree(dofmap.k).n_k;
    if (bases.size() != mesh.n_triangles() || dofmap.element_to_global.size() != mesh.n_triangles())
        throw Error(ErrorCode::InconsistentDof, "bases or dof map do not cover the mesh");
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        if (static_cast<int>(dofmap.element_to_global[t].size()) != n_k || bases[t].reference.size() != n_k)
            throw Error(ErrorCode::InconsistentDof, "element " + std::to_string(t) + " local size disagrees with k");
    }
}

// (B_T)_ij = integral of grad(trial_j) . grad(test_i) over T.
Eigen::MatrixXd element_stiffness(const LocalBasis& basis, const std::array<Point, 3>& T, const TriangleRule& rule,
                                  bool trial_modified, bool test_modified) {
    const int n = basis.reference.size();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    const double area = triangle_area(T);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = barycentric_to_point(T, rule.points[q]);
        const Eigen::MatrixX2d std_grad = basis.reference.gradients(x);
        const Eigen::MatrixX2d mod_grad = basis.coeffs.transpose() * std_grad;
        const auto& trial = trial_modified ? mod_grad : std_grad;
        const auto& test = test_modified ? mod_grad : std_grad;
        B.noalias() += (rule.weights[q] * area) * (test * trial.transpose());
    }
    return B;
}

}  // namespace

AssembledSystem assemble(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                         const ProblemSpec& problem, const QuadratureDegrees& rules) {
    check_consistent(mesh, dofmap, bases);
    const auto degrees = rules.resolved(dofmap.k);
    const TriangleRule& stiff_rule = rule_for_degree(degrees.stiffness);
    const TriangleRule& load_rule = rule_for_degree(degrees.load);
    const auto n = static_cast<Eigen::Index>(dofmap.n_unknowns());

    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto T = mesh.corners(t);
        const LocalBasis& basis = bases[t];
        const auto& globals = dofmap.element_to_global[t];
        const Eigen::MatrixXd B = element_stiffness(basis, T, stiff_rule, true, false);

        const double area = triangle_area(T);
        Eigen::VectorXd load = Eigen::VectorXd::Zero(basis.reference.size());
        for (std::size_t q = 0; q < load_rule.size(); ++q) {
            const Point x = barycentric_to_point(T, load_rule.points[q]);
            load += (load_rule.weights[q] * area * problem.source(x)) * basis.reference.values(x);
        }

        for (int i = 0; i < B.rows(); ++i) {
            const int row = dofmap.unknown_of_node[globals[i]];
            if (row < 0) continue;
            rhs[row] += load[i];
            for (int j = 0; j < B.cols(); ++j) {
                const int node = globals[j];
                const int col = dofmap.unknown_of_node[node];
                if (col >= 0)
                    triplets.emplace_back(row, col, B(i, j));
                else
                    rhs[row] -= B(i, j) * dofmap.node_status[node].value;
            }
        }
    }
    AssembledSystem sys{SparseMatrix(n, n), std::move(rhs)};
    sys.A.setFromTriplets(triplets.begin(), triplets.end());
    sys.A.makeCompressed();
    return sys;
}

SparseMatrix assemble_gram(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                           BasisChoice choice, const QuadratureDegrees& rules) {
    check_consistent(mesh, dofmap, bases);
    const TriangleRule& rule = rule_for_degree(rules.resolved(dofmap.k).stiffness);
    const bool modified = choice == BasisChoice::trial_space;
    const auto n = static_cast<Eigen::Index>(dofmap.n_unknowns());

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& globals = dofmap.element_to_global[t];
        const Eigen::MatrixXd B = element_stiffness(bases[t], mesh.corners(t), rule, modified, modified);
        for (int i = 0; i < B.rows(); ++i) {
            const int row = dofmap.unknown_of_node[globals[i]];
            if (row < 0) continue;
            for (int j = 0; j < B.cols(); ++j) {
                const int col = dofmap.unknown_of_node[globals[j]];
                if (col >= 0) triplets.emplace_back(row, col, B(i, j));
            }
        }
    }
    SparseMatrix G(n, n);
    G.setFromTriplets(triplets.begin(), triplets.end());
    G.makeCompressed();

    Eigen::SimplicialLLT<SparseMatrix> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::NotSPD, "gradient Gram matrix is not positive definite");
    return G;
}

void write_matrix_coo(std::ostream& out, const SparseMatrix& A) {
    char buf[64];
    for (int col = 0; col < A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
            auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
            out << it.row() << ' ' << it.col() << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
        }
    }
}

}  // namespace pgfem
