#pragma once

#include "pgfem/assembly.hpp"

namespace pgfem {

/// Quarter ellipse (x/e)^2 + y^2 < 1 with
/// u = (e^2 - e^2 x^2 - y^2)(e^2 - x^2 - e^2 y^2), f = -lap u, d = 0.
ProblemSpec ellipse_test1(double e = 0.5, ExtensionMode mode = ExtensionMode::analytic);

/// Quarter annulus e < r < 1 with u = (r - e)(1 - r), f = -lap u, d = 0.
ProblemSpec annulus_test2(double e = 0.5, ExtensionMode mode = ExtensionMode::analytic);

/// Polygon with a polynomial solution of total degree `degree` (1..3); the
/// Dirichlet datum is the solution itself.
ProblemSpec polygon_patch(BoundaryGeometry polygon, int degree);

BoundaryGeometry unit_square();

}  // namespace pgfem
