#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nondivfem/assembly.hpp"
#include "nondivfem/problems.hpp"
#include "nondivfem/quadrature.hpp"

using namespace ndfem;

namespace {

TriangleMesh reference_triangle_mesh() {
    TriangleMesh mesh;
    mesh.domain = DomainKind::polygon;
    mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    mesh.cells = {{0, 1, 2}};
    mesh.finalize();
    return mesh;
}

ThetaOperatorContext laplace_ctx(double theta) {
    ThetaOperatorContext ctx;
    ctx.theta = theta;
    ctx.coeffs = [](int, int, Vec2) {
        return PointCoefficients{Mat2::identity(), Vec2{0.0, 0.0}, 0.0};
    };
    return ctx;
}

// closed-form a_theta matrix for P1 on the unit reference triangle with
// A = I, b = 0, c = 0: only integrals of products of linear functions appear,
//   int 1 = 1/2, int l_i = 1/6, int l_i l_j = (i==j ? 1/12 : 1/24).
std::vector<double> reference_triangle_oracle() {
    const double area = 0.5;
    const Vec2 grad[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    auto mass = [&](int i, int j) { return i == j ? 1.0 / 12.0 : 1.0 / 24.0; };
    const int n = 9;  // 3 u dofs + 6 g dofs (node-major, component-minor)
    std::vector<double> m(n * n, 0.0);
    auto at = [&](int a, int b) -> double& { return m[a * n + b]; };

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) at(i, j) = area * grad[i].dot(grad[j]);

    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int c = 0; c < 2; ++c) {
                const double gi_c = c == 0 ? grad[i].x : grad[i].y;
                // (grad phi_i, -e_c l_j) integrates grad component against l_j
                const double value = -(1.0 / 6.0) * gi_c;
                at(i, 3 + 2 * j + c) = value;
                at(3 + 2 * j + c, i) = value;
            }
        }
    }

    for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 2; ++c) {
            for (int j = 0; j < 3; ++j) {
                for (int d = 0; d < 2; ++d) {
                    const double rot_i = c == 0 ? -grad[i].y : grad[i].x;
                    const double rot_j = d == 0 ? -grad[j].y : grad[j].x;
                    const double m_i = c == 0 ? grad[i].x : grad[i].y;  // I : (e_c x grad)
                    const double m_j = d == 0 ? grad[j].x : grad[j].y;
                    double value = area * (rot_i * rot_j + m_i * m_j);
                    if (c == d) value += mass(i, j);
                    at(3 + 2 * i + c, 3 + 2 * j + d) = value;
                }
            }
        }
    }
    return m;
}

}  // namespace

TEST_CASE("M_theta pointwise identities") {
    const PointCoefficients laplace{Mat2::identity(), Vec2{0.0, 0.0}, 0.0};
    // zero pair maps to zero
    CHECK(apply_Mtheta(0.5, laplace, 0.0, {0, 0}, {0, 0}, Mat2{}) == 0.0);
    // A = I reduces the second-order term to the divergence of psi
    const Mat2 dpsi{1.5, 0.3, -0.2, 2.5};
    for (double theta : {0.0, 0.5, 1.0})
        CHECK(apply_Mtheta(theta, laplace, 3.0, {1, 2}, {4, 5}, dpsi) ==
              doctest::Approx(dpsi.trace()).epsilon(1e-15));
    // the blending acts on the advection term only
    const PointCoefficients pc{Mat2::identity(), Vec2{2.0, 0.0}, 1.0};
    const double m0 = apply_Mtheta(0.0, pc, 1.0, {1, 0}, {3, 0}, Mat2{});
    const double m1 = apply_Mtheta(1.0, pc, 1.0, {1, 0}, {3, 0}, Mat2{});
    CHECK(m0 == doctest::Approx(2.0 * 1.0 - 1.0));
    CHECK(m1 == doctest::Approx(2.0 * 3.0 - 1.0));
}

TEST_CASE("assembled matrix on the reference triangle matches the closed-form oracle") {
    const TriangleMesh mesh = reference_triangle_mesh();
    const FeSpace su = build_space(mesh, 1, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
    for (double theta : {0.0, 0.5, 1.0}) {
        const SparseSymSystem sys = assemble_system(su, sg, laplace_ctx(theta),
                                                    load_from([](Vec2) { return 0.0; }));
        const std::vector<double> oracle = reference_triangle_oracle();
        REQUIRE(sys.matrix.n == 9);
        for (int r = 0; r < 9; ++r) {
            for (int c = 0; c < 9; ++c) {
                double value = 0.0;
                for (std::int64_t k = sys.matrix.row_ptr[r]; k < sys.matrix.row_ptr[r + 1];
                     ++k)
                    if (sys.matrix.col[k] == c) value = sys.matrix.val[k];
                CHECK(std::abs(value - oracle[r * 9 + c]) < 1e-12);
            }
        }
    }
}

TEST_CASE("assembled matrices are exactly symmetric") {
    const ProblemSpec problem = builtin("linear-cordes");
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    const FeSpace su = build_space(mesh, 2, 1, Constraint::zero_trace);
    const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
    const ThetaOperatorContext ctx = ThetaOperatorContext::from_set(problem.coeffs, 0.5);
    const CoefficientSet cs = problem.coeffs;
    const SparseSymSystem sys =
        assemble_system(su, sg, ctx, load_from([cs](Vec2 x) { return cs.f(x, 0.0); }));
    CHECK(sys.matrix.symmetry_defect() <= 1e-12);
}

TEST_CASE("curl block vanishes on interpolated gradient fields") {
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
    // gradient of the quadratic v = x^2 + x y is linear, hence representable
    const FeFunction psi =
        interpolate(sg, [](Vec2 x) { return Vec2{2.0 * x.x + x.y, x.x}; });
    const QuadratureRule rule = triangle_quadrature(6);
    std::vector<Vec2> pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) pts[q] = rule.ref_point(q);
    double curl_energy = 0.0;
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
        const VectorEval eval = evaluate_vector(psi, cell, pts);
        const CellMap map = mesh.cell_map(cell);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double rot = eval.jacobians[q].a21 - eval.jacobians[q].a12;
            curl_energy += rule.weights[q] * std::abs(map.jacobian(pts[q]).det()) * rot * rot;
        }
    }
    CHECK(curl_energy < 1e-22);
}

TEST_CASE("M_theta residual of the interpolated exact pair shrinks at O(h^2) for P2") {
    const ProblemSpec problem = builtin("linear-cordes");
    TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    std::vector<double> residuals;
    for (int level = 0; level < 3; ++level) {
        const FeSpace su = build_space(mesh, 2, 1, Constraint::none);
        const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
        const FeFunction u = interpolate(su, problem.exact.u);
        const FeFunction g = interpolate(sg, problem.exact.grad);
        const ThetaOperatorContext ctx = ThetaOperatorContext::from_set(problem.coeffs, 0.5);
        const CoefficientSet cs = problem.coeffs;
        const double energy = assemble_energy(
            ctx, u, g, load_from([cs](Vec2 x) { return cs.f(x, 0.0); }), 8);
        residuals.push_back(std::sqrt(energy));
        if (level + 1 < 3) mesh = refine_uniform(mesh);
    }
    CHECK(residuals[0] / residuals[1] > 3.0);
    CHECK(residuals[1] / residuals[2] > 3.0);
}

TEST_CASE("energy of the zero pair with zero load vanishes") {
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 1);
    const FeSpace su = build_space(mesh, 1, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
    const FeFunction u(su);
    const FeFunction g(sg);
    const double energy =
        assemble_energy(laplace_ctx(0.5), u, g, load_from([](Vec2) { return 0.0; }));
    CHECK(energy == 0.0);
}

TEST_CASE("theta-independence of the energy at the exact pair") {
    // with psi = grad phi the blending term collapses, so E_theta of the
    // interpolated exact pair is theta-independent up to interpolation error
    const ProblemSpec problem = builtin("poisson-disk");
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 4);
    const FeSpace su = build_space(mesh, 2, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
    const FeFunction u = interpolate(su, problem.exact.u);
    const FeFunction g = interpolate(sg, problem.exact.grad);
    const LoadField f = load_from([](Vec2) { return 1.0; });
    std::vector<double> energies;
    for (double theta : {0.0, 0.5, 1.0}) {
        const ThetaOperatorContext ctx = ThetaOperatorContext::from_set(problem.coeffs, theta);
        energies.push_back(assemble_energy(ctx, u, g, f));
    }
    // the quadratic exact solution is reproduced exactly on straight cells:
    // all three energies vanish to rounding
    for (double e : energies) CHECK(std::abs(e) < 1e-20);
}

TEST_CASE("galerkin orthogonality: discrete residual at the solver tolerance") {
    const ProblemSpec problem = builtin("linear-cordes");
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    const FeSpace su = build_space(mesh, 2, 1, Constraint::zero_trace);
    const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
    const ThetaOperatorContext ctx = ThetaOperatorContext::from_set(problem.coeffs, 0.5);
    const CoefficientSet cs = problem.coeffs;
    const LoadField f = load_from([cs](Vec2 x) { return cs.f(x, 0.0); });
    const SparseSymSystem sys = assemble_system(su, sg, ctx, f);

    SolveStats stats;
    const std::vector<double> x =
        pcg_solve(sys.matrix, sys.rhs, 1e-11, 20000, Preconditioner::ichol, &stats);
    const std::vector<double> ax = sys.matrix.multiply(x);
    double res = 0.0, load = 0.0;
    for (int i = 0; i < sys.matrix.n; ++i) {
        res += (ax[i] - sys.rhs[i]) * (ax[i] - sys.rhs[i]);
        load += sys.rhs[i] * sys.rhs[i];
    }
    CHECK(std::sqrt(res) <= 1e-10 * std::sqrt(load));
}

TEST_CASE("coercivity witnesses: Cholesky and Lanczos on Cordes-passing systems") {
    for (const char* name : {"poisson-disk", "linear-cordes"}) {
        const ProblemSpec problem = builtin(name);
        const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
        const FeSpace su = build_space(mesh, 1, 1, Constraint::zero_trace);
        const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
        const ThetaOperatorContext ctx = ThetaOperatorContext::from_set(problem.coeffs, 0.5);
        const CoefficientSet cs = problem.coeffs;
        const SparseSymSystem sys =
            assemble_system(su, sg, ctx, load_from([cs](Vec2 x) { return cs.f(x, 0.0); }));
        CHECK_NOTHROW(dense_cholesky_solve(sys.matrix, sys.rhs));
        CHECK(lanczos_smallest_ritz(sys.matrix, 30) > 0.0);
    }
}

TEST_CASE("poisson on the disk: P1 solution magnitude approaches 1/4 at O(h^2)") {
    TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    std::vector<double> deviation;
    for (int level = 0; level < 3; ++level) {
        const FeSpace su = build_space(mesh, 1, 1, Constraint::zero_trace);
        const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
        const SparseSymSystem sys = assemble_system(su, sg, laplace_ctx(0.5),
                                                    load_from([](Vec2) { return 1.0; }));
        SolveStats stats;
        const auto x = pcg_solve(sys.matrix, sys.rhs, 1e-10, 20000,
                                 Preconditioner::ichol, &stats);
        CHECK(stats.relative_residual <= 1e-10);
        FeFunction u, g;
        split_solution(x, su, sg, sys.partition, u, g);
        double max_abs = 0.0;
        for (double c : u.coeffs) max_abs = std::max(max_abs, std::abs(c));
        deviation.push_back(std::abs(max_abs - 0.25));
        if (level + 1 < 3) mesh = refine_uniform(mesh);
    }
    CHECK(deviation[1] < deviation[0]);
    CHECK(deviation[2] < 0.5 * deviation[1]);
    CHECK(deviation[2] < 0.01);
}
