#include "pgfem/quadrature.hpp"

#include <numbers>
#include <string>

namespace pgfem {

namespace {

// Gauss-Legendre nodes and weights mapped to [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

// Collapsed (Duffy) product of Gauss-Legendre rules: x = u, y = (1-u) v with
// Jacobian (1-u). With n points per direction the rule is exact to degree 2n-2.
TriangleRule collapsed_rule(int d) {
    const int n = (d + 3) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    TriangleRule rule{d, {}, {}};
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double u = x[a];
            const double v = x[b];
            const double l1 = u;
            const double l2 = (1.0 - u) * v;
            rule.points.push_back({1.0 - l1 - l2, l1, l2});
            rule.weights.push_back(2.0 * w[a] * w[b] * (1.0 - u));
        }
    }
    return rule;
}

std::array<TriangleRule, kMaxRuleDegree + 1> build_rules() {
    std::array<TriangleRule, kMaxRuleDegree + 1> rules;
    const double third = 1.0 / 3.0;
    rules[0] = TriangleRule{0, {{third, third, third}}, {1.0}};
    rules[1] = TriangleRule{1, {{third, third, third}}, {1.0}};
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    rules[2] = TriangleRule{2, {{a, b, b}, {b, a, b}, {b, b, a}}, {third, third, third}};
    for (int d = 3; d <= kMaxRuleDegree; ++d) rules[d] = collapsed_rule(d);
    return rules;
}

}  // namespace

const TriangleRule& rule_for_degree(int d) {
    static const auto rules = build_rules();
    if (d < 0 || d > kMaxRuleDegree)
        throw Error(ErrorCode::UnsupportedDegree, "no triangle rule of degree " + std::to_string(d));
    return rules[d];
}

}  // namespace pgfem
