#include <doctest.h>

#include <cmath>

#include "nondivfem/quadrature.hpp"

using namespace ndfem;

namespace {

// exact monomial integral over the reference triangle:
// int x^a y^b dx dy = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) {
    double num = 1.0;
    for (int i = 2; i <= a; ++i) num *= i;
    for (int i = 2; i <= b; ++i) num *= i;
    double den = 1.0;
    for (int i = 2; i <= a + b + 2; ++i) den *= i;
    return num / den;
}

double integrate_monomial(const QuadratureRule& rule, int a, int b) {
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 p = rule.ref_point(q);
        sum += rule.weights[q] * std::pow(p.x, a) * std::pow(p.y, b);
    }
    return sum;
}

}  // namespace

TEST_CASE("weights sum to the reference area for all degrees") {
    for (int degree = 1; degree <= 10; ++degree) {
        const QuadratureRule rule = triangle_quadrature(degree);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("linear monomials integrate exactly at degree 1") {
    const QuadratureRule rule = triangle_quadrature(1);
    CHECK(integrate_monomial(rule, 1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(integrate_monomial(rule, 0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("degree-4 rule reproduces x^2 y^2 = 1/180") {
    const QuadratureRule rule = triangle_quadrature(4);
    CHECK(std::abs(integrate_monomial(rule, 2, 2) - 1.0 / 180.0) < 1e-14);
}

TEST_CASE("all monomials up to the declared degree are exact") {
    for (int degree = 1; degree <= 10; ++degree) {
        const QuadratureRule rule = triangle_quadrature(degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                const double exact = monomial_integral(a, b);
                CHECK(std::abs(integrate_monomial(rule, a, b) - exact) < 1e-14);
            }
        }
    }
}

TEST_CASE("unsupported degrees are rejected") {
    CHECK_THROWS_AS(triangle_quadrature(0), Error);
    CHECK_THROWS_AS(triangle_quadrature(11), Error);
}

TEST_CASE("points are barycentric and inside the triangle") {
    const QuadratureRule rule = triangle_quadrature(6);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& bary = rule.points[q];
        CHECK(bary[0] + bary[1] + bary[2] == doctest::Approx(1.0).epsilon(1e-14));
        for (double l : bary) CHECK(l >= 0.0);
    }
}
