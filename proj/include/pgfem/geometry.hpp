#pragma once

#include "pgfem/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pgfem {

enum class GeometryKind { ellipse, annulus, polygon };

enum class PointClass { inside, on_boundary, outside };

enum class SkinSide { curve_outside_chord, curve_inside_chord, coincident };

/// Implicit description of the physical boundary. The level-set function g is
/// negative inside the domain, zero on the boundary and positive outside.
///
/// Curved domains are stored as a union of smooth pieces. The ellipse
/// (x/e)^2 + y^2 = 1 has one piece. The annulus e < r < 1 has two: the outer
/// circle (g = r - 1) and the inner circle (g = e - r), and the global g is
/// their maximum. A polygon uses the signed distance to its edges and is the
/// degenerate case where the mesh boundary coincides with the true one.
class BoundaryGeometry {
public:
    static BoundaryGeometry ellipse(double e);
    static BoundaryGeometry annulus(double e);
    /// Vertices in counterclockwise order.
    static BoundaryGeometry polygon(std::vector<Point> vertices);

    GeometryKind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    const std::vector<Point>& polygon_vertices() const noexcept { return vertices_; }
    bool is_curved() const noexcept { return kind_ != GeometryKind::polygon; }

    double value(const Point& p) const;
    Point gradient(const Point& p) const;

    std::size_t piece_count() const noexcept;
    double piece_value(std::size_t piece, const Point& p) const;
    Point piece_gradient(std::size_t piece, const Point& p) const;
    /// Piece whose level set is closest (in |g|) to p.
    std::size_t nearest_piece(const Point& p) const;

private:
    BoundaryGeometry(GeometryKind kind, double param, std::vector<Point> vertices)
        : kind_(kind), param_(param), vertices_(std::move(vertices)) {}

    GeometryKind kind_;
    double param_;
    std::vector<Point> vertices_;
};

struct RayIntersectionQuery {
    Point origin;   // interior vertex opposite the boundary edge
    Point through;  // subdivision point on the boundary edge
    double t_min = 0.5;
    double t_max = 2.0;
};

struct RayIntersection {
    Point point;
    double t;
    int iterations;
};

PointClass classify_point(const BoundaryGeometry& geom, const Point& p, double tol);

/// Intersection of the ray origin + t (through - origin) with the boundary,
/// taking the root nearest to t = 1. Safeguarded Newton with bisection
/// fallback. When `piece` is empty the piece closest to `through` is used.
RayIntersection ray_boundary_intersection(const BoundaryGeometry& geom,
                                          const RayIntersectionQuery& query,
                                          double tol = 1e-12,
                                          std::optional<std::size_t> piece = std::nullopt);

/// Which side of the chord ab the boundary arc between a and b lies on,
/// judged by the sign of g at the chord midpoint.
SkinSide edge_skin_side(const BoundaryGeometry& geom, const Point& a, const Point& b,
                        double tol = 1e-12);

}  // namespace pgfem
