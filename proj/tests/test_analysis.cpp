#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "nondivfem/analysis.hpp"
#include "nondivfem/assembly.hpp"
#include "nondivfem/problems.hpp"
#include "nondivfem/sparse.hpp"

using namespace ndfem;

TEST_CASE("zero pair against the zero solution gives zero norms") {
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 1);
    const FeSpace su = build_space(mesh, 1, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
    ExactSolution zero;
    zero.available = true;
    zero.u = [](Vec2) { return 0.0; };
    zero.grad = [](Vec2) { return Vec2{0, 0}; };
    zero.hess = [](Vec2) { return Mat2{}; };
    const ErrorNorms norms = error_norms(FeFunction(su), FeFunction(sg), zero);
    CHECK(norms.u_l2 == 0.0);
    CHECK(norms.u_h1 == 0.0);
    CHECK(norms.g_l2 == 0.0);
    CHECK(norms.g_h1 == 0.0);
    CHECK(norms.y == 0.0);
}

TEST_CASE("Y-norm additivity against separately computed pieces") {
    const ProblemSpec problem = builtin("linear-cordes");
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    const FeSpace su = build_space(mesh, 1, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
    const FeFunction u = interpolate(su, [](Vec2 x) { return x.x * x.y; });
    const FeFunction g = interpolate(sg, [](Vec2 x) { return Vec2{x.y, -x.x}; });
    const ErrorNorms norms = error_norms(u, g, problem.exact);
    CHECK(norms.y * norms.y ==
          doctest::Approx(norms.u_h1 * norms.u_h1 + norms.g_h1 * norms.g_h1).epsilon(1e-12));
}

TEST_CASE("poisson manufactured solution: P1 EOC 2 in L2 and 1 in H1") {
    const ProblemSpec problem = builtin("poisson-disk");
    TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 2);
    std::vector<double> h, e_l2, e_h1;
    for (int level = 0; level < 4; ++level) {
        const FeSpace su = build_space(mesh, 1, 1, Constraint::zero_trace);
        const FeSpace sg = build_space(mesh, 1, 2, Constraint::none);
        ThetaOperatorContext ctx;
        ctx.theta = 0.5;
        ctx.coeffs = [](int, int, Vec2) {
            return PointCoefficients{Mat2::identity(), Vec2{0, 0}, 0.0};
        };
        const SparseSymSystem sys =
            assemble_system(su, sg, ctx, load_from([](Vec2) { return 1.0; }));
        const auto x = pcg_solve(sys.matrix, sys.rhs, 1e-11, 30000, Preconditioner::ichol);
        FeFunction u, g;
        split_solution(x, su, sg, sys.partition, u, g);
        const ErrorNorms norms = error_norms(u, g, problem.exact);
        h.push_back(mesh.h);
        e_l2.push_back(norms.u_l2);
        e_h1.push_back(norms.u_h1);
        if (level + 1 < 4) mesh = refine_uniform(mesh);
    }
    const std::vector<double> r_l2 = eoc(h, e_l2);
    const std::vector<double> r_h1 = eoc(h, e_h1);
    CHECK(r_l2.back() == doctest::Approx(2.0).epsilon(0.15));
    CHECK(r_h1.back() == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("interpolant errors equal independently integrated interpolation errors") {
    const ProblemSpec problem = builtin("linear-cordes");
    const TriangleMesh mesh = generate_disk_mesh({0, 0}, 1.0, 3);
    const FeSpace su = build_space(mesh, 2, 1, Constraint::none);
    const FeSpace sg = build_space(mesh, 2, 2, Constraint::none);
    const FeFunction u = interpolate(su, problem.exact.u);
    const FeFunction g = interpolate(sg, problem.exact.grad);
    const ErrorNorms norms = error_norms(u, g, problem.exact);

    // independent integration path
    const QuadratureRule rule = triangle_quadrature(8);
    std::vector<Vec2> pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) pts[q] = rule.ref_point(q);
    KahanSum l2;
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
        const CellMap map = mesh.cell_map(cell);
        const ScalarEval eval = evaluate_scalar(u, cell, pts);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double diff = problem.exact.u(map.point(pts[q])) - eval.values[q];
            l2.add(rule.weights[q] * std::abs(map.jacobian(pts[q]).det()) * diff * diff);
        }
    }
    CHECK(norms.u_l2 == doctest::Approx(std::sqrt(l2.value())).epsilon(1e-12));
}

TEST_CASE("eoc arithmetic") {
    CHECK(eoc({1.0, 0.5}, {1.0, 0.25})[0] == doctest::Approx(2.0));
    CHECK(eoc({1.0, 0.5, 0.25}, {3.0, 3.0, 3.0})[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(eoc({1.0, 1.0}, {1.0, 0.5}), Error);
    CHECK_THROWS_AS(eoc({0.5, 1.0}, {1.0, 0.5}), Error);
    CHECK_THROWS_AS(eoc({1.0}, {1.0}), Error);
    CHECK(eoc_vs_dofs({100, 400}, {1.0, 0.5})[0] == doctest::Approx(1.0));
}

TEST_CASE("records round-trip through CSV") {
    std::vector<ConvergenceRecord> records(2);
    records[0] = {0, 0.5, 100, 1e-2, 2e-2, 3e-2, 4e-2, 5e-2, 6e-2, 0.0, 3, true};
    records[1] = {1, 0.25, 400, 5e-3, 1e-2, 2e-2, 2.5e-2, 3e-2, 4e-2, 1.5, 4, true};
    std::stringstream ss;
    write_records_csv(ss, records);
    const std::vector<ConvergenceRecord> parsed = read_records_csv(ss);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].dofs == 400);
    CHECK(parsed[1].err_y == doctest::Approx(records[1].err_y));
    CHECK(parsed[0].newton_iters == 3);
    CHECK(parsed[1].eoc_y == doctest::Approx(1.5));
}

TEST_CASE("csv header matches the documented schema") {
    std::stringstream ss;
    write_records_csv(ss, {});
    std::string header;
    std::getline(ss, header);
    CHECK(header ==
          "level,h,dofs,err_u_l2,err_u_h1,err_g_l2,err_g_h1,err_Y,eta,eoc_Y,newton_iters");
}

TEST_CASE("log-log interpolation at a dof budget") {
    std::vector<ConvergenceRecord> records(2);
    records[0].dofs = 100;
    records[0].err_y = 1.0;
    records[0].has_exact = true;
    records[1].dofs = 10000;
    records[1].err_y = 0.01;
    records[1].has_exact = true;
    const double mid = interpolate_at_dofs(
        records, [](const ConvergenceRecord& r) { return r.err_y; }, 1000);
    CHECK(mid == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("regression rate over a dof window") {
    std::vector<ConvergenceRecord> records;
    for (int i = 0; i < 5; ++i) {
        ConvergenceRecord r;
        r.dofs = 100L << (2 * i);   // x4 per level
        r.err_y = std::pow(0.5, i);  // halves per level: rate 1 vs dofs^(1/2)
        r.has_exact = true;
        records.push_back(r);
    }
    const double rate = regression_rate_vs_dofs(
        records, [](const ConvergenceRecord& r) { return r.err_y; }, 0, 1L << 40);
    CHECK(rate == doctest::Approx(1.0).epsilon(1e-10));
}
