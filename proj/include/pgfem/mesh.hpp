#pragma once

#include "pgfem/core.hpp"
#include "pgfem/geometry.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pgfem {

enum class EdgeTag { dirichlet_curved, symmetry_straight };

struct BoundaryEdge {
    std::array<int, 2> v;
    EdgeTag tag;
};

/// Local edge i of a triangle joins local vertices i and (i+1)%3.
/// The vertex opposite edge i is (i+2)%3.
inline constexpr int opposite_vertex(int local_edge) { return (local_edge + 2) % 3; }

struct ElementClass {
    int boundary_edge = -1;  // local edge on the curved boundary, -1 for interior elements
    bool is_boundary() const noexcept { return boundary_edge >= 0; }
};

/// Straight-edged triangulation. Triangles are counterclockwise.
struct TriMesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<ElementClass> element_class;  // filled by classify_elements
    std::vector<double> h_per_element;
    std::vector<double> rho_per_element;

    std::size_t n_vertices() const noexcept { return vertices.size(); }
    std::size_t n_triangles() const noexcept { return triangles.size(); }
    std::array<Point, 3> corners(std::size_t t) const {
        const auto& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }
};

struct MeshStats {
    double h;
    double gamma;
    std::size_t n_elements;
    std::size_t n_vertices;
    double min_h;
};

enum class AngularRange { half_pi, quarter_pi };

/// square_rings: polar image of the uniform J x J mesh of the unit square.
/// Square node (i, j) lies on ring rho = max(i, j) / J; each ring is the image
/// of an L-shaped path of the square and carries 2 rho J segments at equal
/// polar angles. (J+1)^2 vertices, 2 J^2 triangles, 2J curved edges.
///
/// polar_fan: (theta, r) grid with J angular cells on every ring and the
/// first ring fanning out of the origin, node (e r cos theta, r sin theta).
/// J^2 + J + 1 vertices, 2 J^2 - J triangles. Its triangles at the origin
/// flatten as J grows.
enum class EllipseLayout { square_rings, polar_fan };

/// Reorients triangles counterclockwise and fills the per-element diameter and
/// inradius. Throws MeshAssumptionViolated on degenerate triangles.
TriMesh make_mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                  std::vector<BoundaryEdge> boundary_edges);

/// Mesh of the quarter ellipse (x/e)^2 + y^2 < 1, x, y > 0. Cells are cut by
/// the (i,j)-(i+1,j+1) diagonal.
TriMesh gen_quarter_ellipse_mesh(int J, double e, EllipseLayout layout = EllipseLayout::square_rings);

/// Polar image of the I x J mesh of (0, theta_max) x (e, 1) on the quarter
/// annulus. theta_max is pi/2 by default.
TriMesh gen_quarter_annulus_mesh(int I, int J, double e, AngularRange range = AngularRange::half_pi);

/// Uniform J x J grid on [x0,x1]x[y0,y1], each square cut by its (i,j)-(i+1,j+1)
/// diagonal, all outer edges tagged Dirichlet.
TriMesh gen_rectangle_mesh(int J, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0);

/// Checks conformity, orientation and boundary tagging; with a curved
/// geometry also checks that Dirichlet edge endpoints lie on the boundary.
void validate_mesh(const TriMesh& mesh, const BoundaryGeometry& geom, double tol = 1e-12);

/// Fills element_class. On curved geometries every triangle owning a
/// Dirichlet edge becomes a boundary element; a triangle owning two throws
/// MeshAssumptionViolated. On polygons no element is shifted.
TriMesh classify_elements(TriMesh mesh, const BoundaryGeometry& geom);

std::size_t count_boundary_elements(const TriMesh& mesh);

MeshStats mesh_stats(const TriMesh& mesh);

/// Text format: `nv nt nb`, nv lines `x y`, nt lines `i1 i2 i3`, nb lines
/// `i1 i2 tag` with tag D or S. Coordinates use shortest round-trip decimals.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);
void write_mesh_file(const std::string& path, const TriMesh& mesh);
TriMesh read_mesh_file(const std::string& path);

}  // namespace pgfem
