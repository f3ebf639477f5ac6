#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "nondivfem/problems.hpp"

using namespace ndfem;

TEST_CASE("unknown builtin names are rejected") {
    CHECK_THROWS_AS(builtin("no-such-problem"), Error);
    CHECK_THROWS_AS(builtin("ma-R", 0.5), Error);  // requires R > 1
}

TEST_CASE("ma-R: f at the origin equals 1/R^2") {
    const ProblemSpec p = builtin("ma-R", std::sqrt(2.0));
    CHECK(p.f_ma({0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    const ProblemSpec p2 = builtin("ma-R", 2.0);
    CHECK(p2.f_ma({0.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("poisson-disk: special Cordes ratio 1/2 and unit load") {
    const ProblemSpec p = builtin("poisson-disk");
    const Mat2 a = p.coeffs.A({0.3, 0.1}, 0.0);
    CHECK(a.frobenius_sq() / (a.trace() * a.trace()) == doctest::Approx(0.5));
    CHECK(p.coeffs.f({0.3, 0.1}, 0.0) == 1.0);
}

TEST_CASE("every builtin with an exact solution satisfies its own PDE") {
    testing::Rng rng(101);
    for (const char* name : {"poisson-disk", "linear-cordes", "ma-R", "hjb-aniso"}) {
        const ProblemSpec p = builtin(name, std::sqrt(2.0));
        REQUIRE(p.exact.available);
        for (int trial = 0; trial < 100; ++trial) {
            const Vec2 x = rng.point_in_disk(0.999);
            CHECK(pde_residual(p, x) < 1e-8);
        }
    }
}

TEST_CASE("ma-R residual also holds for R = 2") {
    testing::Rng rng(103);
    const ProblemSpec p = builtin("ma-R", 2.0);
    for (int trial = 0; trial < 100; ++trial)
        CHECK(pde_residual(p, rng.point_in_disk(0.999)) < 1e-10);
}

TEST_CASE("hjb exact solution is continuous across its boundaries") {
    const ProblemSpec p = builtin("hjb-aniso");
    // one-sided limits at r = 1
    for (double phi : {0.3, 1.0, 2.5, 4.0}) {
        const double r = 1.0 - 1e-9;
        const Vec2 x{r * std::cos(phi), r * std::sin(phi)};
        CHECK(std::abs(p.exact.u(x)) < 1e-12);
    }
    // one-sided limits at the ray phi = 3 pi / 2 (approach from inside)
    for (double eps : {1e-6, 1e-8}) {
        const double phi = 1.5 * M_PI - eps;
        const Vec2 x{0.5 * std::cos(phi), 0.5 * std::sin(phi)};
        CHECK(std::abs(p.exact.u(x)) < 1e-10);
    }
    // exactly outside the sector the extension is zero
    CHECK(p.exact.u({0.1, -0.2}) == 0.0);            // phi in (3pi/2, 2pi)
    CHECK(p.exact.u({2.0, 0.0}) == 0.0);             // outside the disk
    CHECK(p.exact.grad({0.1, -0.2}).norm() == 0.0);
}

TEST_CASE("hjb exact solution is positive inside the sector") {
    const ProblemSpec p = builtin("hjb-aniso");
    CHECK(p.exact.u({0.0, 0.5}) > 0.0);
    CHECK(p.exact.u({-0.4, 0.2}) > 0.0);
}

TEST_CASE("hjb gradient and hessian match finite differences of u") {
    const ProblemSpec p = builtin("hjb-aniso");
    testing::Rng rng(107);
    const double step = 1e-6;
    int tested = 0;
    while (tested < 25) {
        const Vec2 x = rng.point_in_disk(0.9);
        const double r = x.norm();
        double phi = std::atan2(x.y, x.x);
        if (phi < 0) phi += 2.0 * M_PI;
        // keep clear of the singular rays and the origin so FD stencils stay
        // inside the smooth region
        if (r < 0.15 || phi < 0.1 || phi > 1.5 * M_PI - 0.1) continue;
        ++tested;

        const Vec2 grad = p.exact.grad(x);
        const double fdx =
            (p.exact.u({x.x + step, x.y}) - p.exact.u({x.x - step, x.y})) / (2 * step);
        const double fdy =
            (p.exact.u({x.x, x.y + step}) - p.exact.u({x.x, x.y - step})) / (2 * step);
        CHECK(grad.x == doctest::Approx(fdx).epsilon(1e-5));
        CHECK(grad.y == doctest::Approx(fdy).epsilon(1e-5));

        const Mat2 hess = p.exact.hess(x);
        const double hxx = (p.exact.grad({x.x + step, x.y}).x -
                            p.exact.grad({x.x - step, x.y}).x) / (2 * step);
        const double hxy = (p.exact.grad({x.x, x.y + step}).x -
                            p.exact.grad({x.x, x.y - step}).x) / (2 * step);
        const double hyy = (p.exact.grad({x.x, x.y + step}).y -
                            p.exact.grad({x.x, x.y - step}).y) / (2 * step);
        CHECK(hess.a11 == doctest::Approx(hxx).epsilon(1e-4));
        CHECK(hess.a12 == doctest::Approx(hxy).epsilon(1e-4));
        CHECK(hess.a22 == doctest::Approx(hyy).epsilon(1e-4));
    }
}

TEST_CASE("hjb diffusion is uniformly elliptic and near degenerate at the rim") {
    const ProblemSpec p = builtin("hjb-aniso");
    testing::Rng rng(109);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 x = rng.point_in_disk();
        const double alpha = rng.uniform(0.0, 2.0 * M_PI);
        const Mat2 a = p.coeffs.A(x, alpha);
        CHECK(std::abs(a.a12 - a.a21) < 1e-14);
        CHECK(a.sym_eigenvalues()[0] > 0.0);
    }
    const Mat2 rim = p.coeffs.A({1.0 - 1e-12, 0.0}, 0.0);
    CHECK(rim.sym_eigenvalues()[0] < 0.011);  // near degenerate
}

TEST_CASE("cordes-violating builtin exposes its coefficients") {
    const ProblemSpec p = builtin("cordes-violating");
    CHECK(p.coeffs.A({0, 0}, 0).a22 == doctest::Approx(1e-4));
    CHECK(p.coeffs.c({0, 0}, 0) == doctest::Approx(2.0));
}

TEST_CASE("problem files load and evaluate") {
    const std::string path = "test_problem_tmp.prob";
    {
        std::ofstream out(path);
        out << "# sample linear problem\n";
        out << "kind linear\n";
        out << "domain square\n";
        out << "A11 1 + 0.1*sin(pi*x1)\n";
        out << "A12 0\n";
        out << "A22 1\n";
        out << "b1 x2\n";
        out << "c 0.5\n";
        out << "f 1 - x1*x2\n";
        out << "lambda 2\n";
    }
    const ProblemSpec p = load_problem_file(path);
    CHECK(p.kind == ProblemSpec::Kind::linear);
    CHECK(p.domain == ProblemSpec::Domain::unit_square);
    CHECK(p.coeffs.A({0.5, 0.0}, 0).a11 == doctest::Approx(1.1));
    CHECK(p.coeffs.b({0.0, 0.25}, 0).x == doctest::Approx(0.25));
    CHECK(p.coeffs.b({0.0, 0.25}, 0).y == 0.0);
    CHECK(p.coeffs.c({0, 0}, 0) == doctest::Approx(0.5));
    CHECK(p.coeffs.f({0.5, 0.5}, 0) == doctest::Approx(0.75));
    CHECK(p.coeffs.lambda == doctest::Approx(2.0));
    std::remove(path.c_str());
}

TEST_CASE("malformed problem files are rejected") {
    const std::string path = "test_problem_bad.prob";
    {
        std::ofstream out(path);
        out << "kind linear\n";  // missing A11/A22/f
    }
    CHECK_THROWS_AS(load_problem_file(path), Error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_problem_file("does_not_exist.prob"), Error);
}

TEST_CASE("the committed example problem files parse") {
    for (const char* path : {"../problems/poisson_square.prob", "../problems/hjb_rotating.prob",
                             "problems/poisson_square.prob", "problems/hjb_rotating.prob",
                             "../../problems/poisson_square.prob"}) {
        std::ifstream probe(path);
        if (!probe) continue;
        CHECK_NOTHROW(load_problem_file(path));
        return;
    }
    WARN_MESSAGE(true, "example problem files not found from the test working directory");
}
