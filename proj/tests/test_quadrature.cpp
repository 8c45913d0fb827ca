#include "doctest.h"

#include "pgfem/quadrature.hpp"

#include <cmath>
#include <random>

using namespace pgfem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1).
double monomial_oracle(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

const std::array<Point, 3> kReference{Point(0, 0), Point(1, 0), Point(0, 1)};

// Dense bivariate polynomial, coefficient (i, j) of r^i s^j.
using Poly = Eigen::MatrixXd;

Poly multiply(const Poly& p, const Poly& q) {
    Poly out = Poly::Zero(p.rows() + q.rows() - 1, p.cols() + q.cols() - 1);
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            for (int k = 0; k < q.rows(); ++k)
                for (int l = 0; l < q.cols(); ++l) out(i + k, j + l) += p(i, j) * q(k, l);
    return out;
}

double integrate_reference(const Poly& p) {
    double sum = 0.0;
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) sum += p(i, j) * monomial_oracle(i, j);
    return sum;
}

}  // namespace

TEST_CASE("low-order rules") {
    const auto& r1 = rule_for_degree(1);
    REQUIRE(r1.size() == 1);
    CHECK(r1.weights[0] == 1.0);
    CHECK(r1.points[0][0] == doctest::Approx(1.0 / 3));

    const auto& r2 = rule_for_degree(2);
    REQUIRE(r2.size() == 3);
    for (std::size_t q = 0; q < 3; ++q) {
        CHECK(r2.weights[q] == doctest::Approx(1.0 / 3));
        CHECK(r2.points[q][q] == doctest::Approx(2.0 / 3));
    }
    CHECK_THROWS_AS(rule_for_degree(11), Error);
    CHECK_THROWS_AS(rule_for_degree(-1), Error);
}

TEST_CASE("rule invariants") {
    for (int d = 0; d <= kMaxRuleDegree; ++d) {
        CAPTURE(d);
        const auto& rule = rule_for_degree(d);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        CHECK(std::abs(sum - 1.0) <= 1e-14);
        for (const auto& p : rule.points) {
            for (double l : p) CHECK(l > 0.0);
            CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("monomials are integrated exactly on the reference triangle") {
    for (int d = 0; d <= kMaxRuleDegree; ++d) {
        for (int a = 0; a <= d; ++a) {
            for (int b = 0; a + b <= d; ++b) {
                CAPTURE(d);
                CAPTURE(a);
                CAPTURE(b);
                const double got = integrate([&](const Point& p) { return std::pow(p.x(), a) * std::pow(p.y(), b); },
                                             kReference, d);
                const double want = monomial_oracle(a, b);
                CHECK(std::abs(got - want) <= 1e-14 * want);
            }
        }
    }
}

TEST_CASE("integrate examples") {
    for (int d = 0; d <= kMaxRuleDegree; ++d)
        CHECK(integrate([](const Point&) { return 1.0; }, kReference, d) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate([](const Point& p) { return p.x(); }, kReference, 1) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(integrate([](const Point& p) { return p.x() * p.x() * p.y() * p.y(); }, kReference, 4) ==
          doctest::Approx(1.0 / 180).epsilon(1e-14));
}

TEST_CASE("exactness and affine invariance on random triangles") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d A;
        A << coord(rng), coord(rng), coord(rng), coord(rng);
        if (std::abs(A.determinant()) < 0.1) continue;
        const Point shift(coord(rng), coord(rng));
        const std::array<Point, 3> T{shift, A.col(0) + shift, A.col(1) + shift};
        for (int d = 0; d <= kMaxRuleDegree; ++d) {
            for (int a = 0; a <= d; ++a) {
                const int b = d - a;
                auto fn = [&](const Point& p) { return std::pow(p.x(), a) * std::pow(p.y(), b); };
                // cancellation-free magnitude for the relative bound
                const double scale = integrate([&](const Point& p) { return std::abs(fn(p)); }, T, kMaxRuleDegree);
                // Oracle: pull back to the reference triangle, expand x^a y^b
                // symbolically and integrate term by term.
                Poly x(2, 2), y(2, 2);
                x << shift.x(), A(0, 1), A(0, 0), 0.0;
                y << shift.y(), A(1, 1), A(1, 0), 0.0;
                Poly prod = Poly::Constant(1, 1, 1.0);
                for (int i = 0; i < a; ++i) prod = multiply(prod, x);
                for (int i = 0; i < b; ++i) prod = multiply(prod, y);
                const double want = integrate_reference(prod) * std::abs(A.determinant());
                const double got = integrate(fn, T, d);
                double oracle_magnitude = 0.0;
                for (int i = 0; i < prod.rows(); ++i)
                    for (int j = 0; j < prod.cols(); ++j)
                        oracle_magnitude += std::abs(prod(i, j)) * monomial_oracle(i, j) * std::abs(A.determinant());
                CHECK(std::abs(got - want) <= 1e-13 * std::max(scale, oracle_magnitude));
            }
        }
    }
}
