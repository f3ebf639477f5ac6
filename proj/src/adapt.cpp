#include "nondivfem/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nondivfem/quadrature.hpp"

namespace ndfem {

ErrorIndicators compute_indicators(const ThetaOperatorContext& ctx, const LoadField& f,
                                   const FeFunction& u_h, const FeFunction& g_h,
                                   int quad_degree) {
    const FeSpace& su = *u_h.space;
    const FeSpace& sg = *g_h.space;
    if (su.mesh != sg.mesh) throw Error("compute_indicators: meshes differ");
    const TriangleMesh& mesh = *su.mesh;
    const int k = std::max(su.degree, sg.degree);
    if (quad_degree <= 0) quad_degree = 2 * k + 2;
    const QuadratureRule rule = triangle_quadrature(quad_degree);

    std::vector<Vec2> pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) pts[q] = rule.ref_point(q);

    ErrorIndicators ind;
    ind.eta_sq.assign(mesh.n_cells(), 0.0);
    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        const CellMap map = mesh.cell_map(cell);
        const ScalarEval ue = evaluate_scalar(u_h, cell, pts);
        const VectorEval ge = evaluate_vector(g_h, cell, pts);
        KahanSum sum;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 ref = pts[q];
            const double wq = rule.weights[q] * std::abs(map.jacobian(ref).det());
            const Vec2 x = map.point(ref);
            const PointCoefficients pc = ctx.coeffs(cell, static_cast<int>(q), x);
            const Vec2 diff = ue.gradients[q] - ge.values[q];
            const double rot = ge.jacobians[q].a21 - ge.jacobians[q].a12;
            const double m = apply_Mtheta(ctx.theta, pc, ue.values[q], ue.gradients[q],
                                          ge.values[q], ge.jacobians[q]) -
                             f(cell, static_cast<int>(q), x);
            sum.add(wq * (diff.norm_sq() + rot * rot + m * m));
        }
        ind.eta_sq[ci] = sum.value();
    });

    KahanSum total;
    for (double v : ind.eta_sq) total.add(v);
    ind.total_sq = total.value();
    return ind;
}

std::vector<int> dorfler_mark(const ErrorIndicators& indicators, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw Error("dorfler_mark: fraction must lie in (0, 1]");
    const int nc = static_cast<int>(indicators.eta_sq.size());
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (indicators.eta_sq[a] != indicators.eta_sq[b])
            return indicators.eta_sq[a] > indicators.eta_sq[b];
        return a < b;  // deterministic tie-break
    });

    std::vector<int> marked;
    if (fraction == 1.0) {  // avoid rounding in the running sum
        for (int c : order) {
            if (indicators.eta_sq[c] <= 0.0) break;
            marked.push_back(c);
        }
        return marked;
    }
    const double target = fraction * indicators.total_sq;
    double mass = 0.0;
    for (int c : order) {
        if (indicators.eta_sq[c] <= 0.0) break;
        marked.push_back(c);
        mass += indicators.eta_sq[c];
        if (mass >= target) break;
    }
    return marked;
}

namespace {

ConvergenceRecord make_record(int level, const TriangleMesh& mesh,
                              const ProblemSpec& problem, const NewtonResult& result) {
    ConvergenceRecord rec;
    rec.level = level;
    rec.h = mesh.h;
    rec.dofs = result.n_free_dofs;
    rec.newton_iters = result.trace.iterations;

    const ErrorIndicators ind =
        compute_indicators(result.final_ctx, result.final_load, result.u, result.g,
                           result.quad_degree);
    rec.eta = ind.total();

    if (problem.exact.available) {
        const ErrorNorms norms = error_norms(result.u, result.g, problem.exact);
        rec.err_u_l2 = norms.u_l2;
        rec.err_u_h1 = norms.u_h1;
        rec.err_g_l2 = norms.g_l2;
        rec.err_g_h1 = norms.g_h1;
        rec.err_y = norms.y;
        rec.has_exact = true;
    }
    return rec;
}

NewtonConfig newton_config(const ExperimentConfig& cfg) {
    NewtonConfig ncfg = cfg.newton;
    ncfg.degree = cfg.degree;
    ncfg.theta = cfg.theta;
    return ncfg;
}

int resolve_geometry_order(const ExperimentConfig& cfg) {
    return cfg.geometry_order > 0 ? cfg.geometry_order : cfg.degree;
}

}  // namespace

std::vector<ConvergenceRecord> uniform_loop(const ProblemSpec& problem,
                                            const ExperimentConfig& cfg,
                                            const LevelCallback& callback) {
    const NewtonConfig ncfg = newton_config(cfg);
    TriangleMesh mesh = make_mesh(problem, cfg.initial_resolution, resolve_geometry_order(cfg));

    std::vector<ConvergenceRecord> records;
    for (int level = 0; level < cfg.levels; ++level) {
        const NewtonResult result = newton_solve(problem, mesh, ncfg);
        const ConvergenceRecord rec = make_record(level, mesh, problem, result);
        records.push_back(rec);
        if (callback) callback(level, mesh, result, rec);
        if (rec.dofs >= cfg.max_dofs) break;
        if (level + 1 < cfg.levels) mesh = refine_uniform(mesh);
    }
    fill_eoc(records, /*adaptive=*/false);
    return records;
}

std::vector<ConvergenceRecord> adapt_loop(const ProblemSpec& problem,
                                          const ExperimentConfig& cfg,
                                          const LevelCallback& callback) {
    const NewtonConfig ncfg = newton_config(cfg);
    TriangleMesh mesh = make_mesh(problem, cfg.initial_resolution, resolve_geometry_order(cfg));

    std::vector<ConvergenceRecord> records;
    for (int level = 0;; ++level) {
        const NewtonResult result = newton_solve(problem, mesh, ncfg);
        const ConvergenceRecord rec = make_record(level, mesh, problem, result);
        records.push_back(rec);
        if (callback) callback(level, mesh, result, rec);
        if (rec.dofs >= cfg.max_dofs) break;

        const ErrorIndicators ind =
            compute_indicators(result.final_ctx, result.final_load, result.u, result.g,
                               result.quad_degree);
        const std::vector<int> marked = dorfler_mark(ind, cfg.mark_fraction);
        if (marked.empty()) break;  // zero residual everywhere
        mesh = refine_marked(mesh, marked);
    }
    fill_eoc(records, /*adaptive=*/true);
    return records;
}

}  // namespace ndfem
