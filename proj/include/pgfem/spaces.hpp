#pragma once

#include "pgfem/core.hpp"
#include "pgfem/geometry.hpp"
#include "pgfem/mesh.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace pgfem {

/// Local dimensions of the degree-k Lagrange triangle. m_k counts the nodes
/// off the boundary edge of a boundary element.
struct SpaceSpec {
    int k;
    int n_k;
    int m_k;

    static SpaceSpec for_degree(int k);
};

/// Standard degree-k Lagrange basis of one straight triangle, written in the
/// triangle's barycentric coordinates. Node order: the three vertices, then
/// k-1 nodes on each edge (v0v1, v1v2, v2v0, each running from its first
/// vertex), then interior nodes. Evaluation is valid anywhere in the plane.
class LagrangeTriangle {
public:
    LagrangeTriangle(const std::array<Point, 3>& corners, int k);

    int degree() const noexcept { return k_; }
    int size() const noexcept { return static_cast<int>(alphas_.size()); }
    const std::array<Point, 3>& corners() const noexcept { return corners_; }

    std::array<double, 3> barycentric(const Point& p) const;
    Eigen::VectorXd values(const Point& p) const;
    /// Row i holds the gradient of basis function i.
    Eigen::MatrixX2d gradients(const Point& p) const;

    std::vector<Point> nodes() const;
    /// Local index of the s-th node (1 <= s <= k-1) on local edge `edge`.
    int edge_node(int edge, int s) const { return 3 + edge * (k_ - 1) + (s - 1); }

private:
    std::array<Point, 3> corners_;
    int k_;
    std::vector<std::array<int, 3>> alphas_;
    Eigen::Matrix2d to_bary_;        // maps p - v0 to (lambda1, lambda2)
    std::array<Point, 3> grad_bary_;
};

/// Principal lattice nodes of T in the LagrangeTriangle order.
std::vector<Point> lagrange_layout(int k, const std::array<Point, 3>& T);

/// Modified nodal basis of one element. The basis functions are
/// psi_j = sum_l coeffs(l, j) phi_l with phi the standard Lagrange basis of
/// the straight triangle and coeffs the inverse of K~(i, j) = phi_j(node_i),
/// so that psi_j(node_i) = delta_ij. Interior elements carry the identity.
struct LocalBasis {
    std::size_t element_id = 0;
    LagrangeTriangle reference;
    std::vector<Point> nodes;
    Eigen::MatrixXd coeffs;
    double kt_deviation = 0.0;
    bool shifted = false;

    Eigen::VectorXd values(const Point& p) const { return coeffs.transpose() * reference.values(p); }
    Eigen::MatrixX2d gradients(const Point& p) const { return coeffs.transpose() * reference.gradients(p); }
};

/// Lagrange nodes of a boundary triangle with the k-1 interior nodes of the
/// curved edge moved onto the boundary along rays from the opposite vertex.
std::vector<Point> shift_boundary_nodes(const std::array<Point, 3>& T, int boundary_edge,
                                        const BoundaryGeometry& geom, int k, double tol = 1e-12);

/// Threshold on cond(K~) past which the local system is rejected.
inline constexpr double kMaxLocalCondition = 1e12;

LocalBasis build_local_basis(const std::array<Point, 3>& T, const std::vector<Point>& nodes, int k,
                             std::size_t element_id = 0);

/// Local bases for every element of a classified mesh.
std::vector<LocalBasis> build_local_bases(const TriMesh& mesh, const BoundaryGeometry& geom, int k);

struct NodeStatus {
    bool dirichlet = false;
    double value = 0.0;
};

/// Global numbering of nodal degrees of freedom shared by the trial space
/// (modified basis, Dirichlet values at the true-boundary nodes) and the test
/// space (standard basis vanishing on the mesh boundary). Both spaces share
/// the same set of unknown nodes.
struct DofMap {
    int k = 0;
    std::vector<Point> node_coords;
    std::vector<NodeStatus> node_status;
    std::vector<std::vector<int>> element_to_global;
    std::vector<int> unknown_of_node;  // -1 for Dirichlet nodes
    std::vector<int> node_of_unknown;

    std::size_t n_nodes() const noexcept { return node_coords.size(); }
    std::size_t n_unknowns() const noexcept { return node_of_unknown.size(); }
    std::size_t n_dirichlet() const noexcept { return n_nodes() - n_unknowns(); }
};

inline constexpr double kNodeMergeTol = 1e-10;

using ScalarField = std::function<double(const Point&)>;

DofMap build_dof_map(const TriMesh& mesh, const std::vector<LocalBasis>& bases, int k,
                     const ScalarField& dirichlet_data);

/// Nodal vector over all global nodes: unknowns from x, Dirichlet nodes from
/// their prescribed values.
Eigen::VectorXd expand_solution(const DofMap& dofmap, const Eigen::VectorXd& x);

struct PointEval {
    double value;
    Point gradient;
};

/// Evaluates the trial-space function with global nodal values `nodal` on
/// element `element`. Points outside the triangle use the same polynomial.
PointEval eval_uh(const DofMap& dofmap, const std::vector<LocalBasis>& bases, const Eigen::VectorXd& nodal,
                  std::size_t element, const Point& p);

}  // namespace pgfem
