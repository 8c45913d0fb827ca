#include "pgfem/problems.hpp"

#include <string>

namespace pgfem {

ProblemSpec ellipse_test1(double e, ExtensionMode mode) {
    const double e2 = e * e;
    ExactSolution exact{
        [e2](const Point& p) {
            const double x2 = p.x() * p.x(), y2 = p.y() * p.y();
            return (e2 - e2 * x2 - y2) * (e2 - x2 - e2 * y2);
        },
        [e2](const Point& p) {
            const double x = p.x(), y = p.y();
            const double a = e2 - e2 * x * x - y * y;
            const double b = e2 - x * x - e2 * y * y;
            return Point(-2.0 * e2 * x * b - 2.0 * x * a, -2.0 * y * b - 2.0 * e2 * y * a);
        }};
    // -lap(ab) = -(lap a) b - 2 grad a . grad b - a lap b
    //          = (2 + 2e^2)(a + b) - 8 e^2 (x^2 + y^2)
    auto f = [e2](const Point& p) {
        const double x2 = p.x() * p.x(), y2 = p.y() * p.y();
        const double a = e2 - e2 * x2 - y2;
        const double b = e2 - x2 - e2 * y2;
        return (2.0 + 2.0 * e2) * (a + b) - 8.0 * e2 * (x2 + y2);
    };
    return ProblemSpec{BoundaryGeometry::ellipse(e), f, [](const Point&) { return 0.0; }, exact, mode};
}

ProblemSpec annulus_test2(double e, ExtensionMode mode) {
    ExactSolution exact{
        [e](const Point& p) {
            const double r = p.norm();
            return (r - e) * (1.0 - r);
        },
        [e](const Point& p) {
            const double r = p.norm();
            return Point((1.0 + e - 2.0 * r) * p / r);
        }};
    // u(r) = -r^2 + (1+e) r - e, lap u = u'' + u'/r = -4 + (1+e)/r
    auto f = [e](const Point& p) { return 4.0 - (1.0 + e) / p.norm(); };
    return ProblemSpec{BoundaryGeometry::annulus(e), f, [](const Point&) { return 0.0; }, exact, mode};
}

ProblemSpec polygon_patch(BoundaryGeometry polygon, int degree) {
    if (polygon.is_curved()) throw Error(ErrorCode::InvalidParam, "patch problems need a polygon");
    if (degree < 1 || degree > 3) throw Error(ErrorCode::InvalidParam, "patch degree must be 1, 2 or 3");
    // Coefficients of 1, x, y, x^2, xy, y^2, x^3, xy^2, y^3 switched on by degree.
    const double c2 = degree >= 2 ? 1.0 : 0.0;
    const double c3 = degree >= 3 ? 1.0 : 0.0;
    ExactSolution exact{
        [c2, c3](const Point& p) {
            const double x = p.x(), y = p.y();
            return 1.0 + 2.0 * x - y + c2 * (x * x + 3.0 * x * y - 2.0 * y * y) +
                   c3 * (x * x * x - x * y * y + 2.0 * y * y * y);
        },
        [c2, c3](const Point& p) {
            const double x = p.x(), y = p.y();
            return Point(2.0 + c2 * (2.0 * x + 3.0 * y) + c3 * (3.0 * x * x - y * y),
                         -1.0 + c2 * (3.0 * x - 4.0 * y) + c3 * (-2.0 * x * y + 6.0 * y * y));
        }};
    auto f = [c2, c3](const Point& p) { return c2 * 2.0 + c3 * (-4.0 * p.x() - 12.0 * p.y()); };
    return ProblemSpec{std::move(polygon), f, exact.value, exact, ExtensionMode::analytic};
}

BoundaryGeometry unit_square() {
    return BoundaryGeometry::polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)});
}

}  // namespace pgfem
