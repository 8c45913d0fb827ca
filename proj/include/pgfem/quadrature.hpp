#pragma once

#include "pgfem/core.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace pgfem {

/// Quadrature rule on a triangle, in barycentric coordinates, with weights
/// normalized to sum to one (multiply by the area).
struct TriangleRule {
    int degree;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
};

inline constexpr int kMaxRuleDegree = 10;

/// Rule exact for all polynomials of total degree <= d, 0 <= d <= 10.
const TriangleRule& rule_for_degree(int d);

inline double triangle_area(const std::array<Point, 3>& T) {
    return 0.5 * std::abs((T[1].x() - T[0].x()) * (T[2].y() - T[0].y()) -
                          (T[2].x() - T[0].x()) * (T[1].y() - T[0].y()));
}

inline Point barycentric_to_point(const std::array<Point, 3>& T, const std::array<double, 3>& lambda) {
    return lambda[0] * T[0] + lambda[1] * T[1] + lambda[2] * T[2];
}

template <class Fn>
double integrate(Fn&& fn, const std::array<Point, 3>& T, int d) {
    const TriangleRule& rule = rule_for_degree(d);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * fn(barycentric_to_point(T, rule.points[q]));
    return sum * triangle_area(T);
}

}  // namespace pgfem
