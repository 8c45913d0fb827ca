#pragma once

#include "pgfem/core.hpp"
#include "pgfem/geometry.hpp"
#include "pgfem/mesh.hpp"
#include "pgfem/spaces.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <optional>

namespace pgfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ExtensionMode { analytic, zero_outside };

struct ExactSolution {
    ScalarField value;
    std::function<Point(const Point&)> gradient;
};

/// Poisson problem -lap u = f in the domain, u = d on its boundary.
struct ProblemSpec {
    BoundaryGeometry geom;
    ScalarField f;
    ScalarField d;
    std::optional<ExactSolution> exact;
    ExtensionMode extension_mode = ExtensionMode::analytic;

    /// f with the extension policy applied outside the physical domain.
    double source(const Point& p) const;
};

/// Quadrature degrees. Negative entries mean "derive from k": stiffness
/// 2(k-1), load 2k+2, error norms 2k+4.
struct QuadratureDegrees {
    int stiffness = -1;
    int load = -1;
    int error = -1;

    QuadratureDegrees resolved(int k) const;
};

/// Rows are test functions (standard basis), columns trial functions
/// (modified basis), both restricted to unknown nodes.
struct AssembledSystem {
    SparseMatrix A;
    Eigen::VectorXd rhs;
};

AssembledSystem assemble(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                         const ProblemSpec& problem, const QuadratureDegrees& rules = {});

enum class BasisChoice { test_space, trial_space };

/// Gradient Gram matrix of the chosen basis over the unknown nodes. Throws
/// NotSPD when a sparse Cholesky factorization fails.
SparseMatrix assemble_gram(const TriMesh& mesh, const DofMap& dofmap, const std::vector<LocalBasis>& bases,
                           BasisChoice choice, const QuadratureDegrees& rules = {});

/// `i j value` per stored entry, 0-based.
void write_matrix_coo(std::ostream& out, const SparseMatrix& A);

}  // namespace pgfem
