#include "nondivfem/nonlinear.hpp"

#include <cmath>
#include <sstream>

#include "nondivfem/cordes.hpp"
#include "nondivfem/quadrature.hpp"

namespace ndfem {

namespace {

std::vector<Vec2> rule_points(const QuadratureRule& rule) {
    std::vector<Vec2> pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) pts[q] = rule.ref_point(q);
    return pts;
}

int resolve_quad_degree(const FeSpace& space_u, int requested) {
    if (requested > 0) return requested;
    return 2 * space_u.degree + 2;
}

struct FrozenLinearization {
    ThetaOperatorContext ctx;
    LoadField load;
};

// freezes the MA linearization at g_n: A = cof(sym D g_n), rhs per paper
FrozenLinearization ma_freeze(const FeFunction& g_n, const std::function<double(Vec2)>& f,
                              double theta, int quad_degree, double* min_eig) {
    const FeSpace& space_g = *g_n.space;
    const TriangleMesh& mesh = *space_g.mesh;
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    const std::vector<Vec2> pts = rule_points(rule);
    const int nq = static_cast<int>(rule.size());

    auto frozen_a =
        std::make_shared<std::vector<Mat2>>(static_cast<std::size_t>(mesh.n_cells()) * nq);
    auto frozen_f =
        std::make_shared<std::vector<double>>(static_cast<std::size_t>(mesh.n_cells()) * nq);

    std::vector<double> cell_min(mesh.n_cells(), 1e300);
    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        const CellMap map = mesh.cell_map(cell);
        const VectorEval ge = evaluate_vector(g_n, cell, pts);
        for (int q = 0; q < nq; ++q) {
            const Mat2 h = ge.jacobians[q].sym();
            const Mat2 cof = h.cofactor();
            const std::size_t idx = static_cast<std::size_t>(cell) * nq + q;
            (*frozen_a)[idx] = cof;
            (*frozen_f)[idx] = f(map.point(pts[q])) - h.det() + cof.ddot(h);
            cell_min[ci] = std::min(cell_min[ci], h.sym_eigenvalues()[0]);
        }
    });
    double worst = 1e300;
    Vec2 worst_at{0.0, 0.0};
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
        if (cell_min[cell] < worst) {
            worst = cell_min[cell];
            worst_at = mesh.cell_centroid(cell);
        }
    }
    if (min_eig) *min_eig = worst;
    if (!(worst > 0.0)) {
        std::ostringstream os;
        os << "ma_newton_step: frozen Hessian not positive definite (worst eigenvalue "
           << worst << " near (" << worst_at.x << ", " << worst_at.y << "))";
        throw Error(os.str());
    }

    FrozenLinearization fl;
    fl.ctx.theta = theta;
    fl.ctx.coeffs = [frozen_a, nq](int cell, int qp, Vec2) {
        return PointCoefficients{(*frozen_a)[static_cast<std::size_t>(cell) * nq + qp],
                                 Vec2{0.0, 0.0}, 0.0};
    };
    fl.load = [frozen_f, nq](int cell, int qp, Vec2) {
        return (*frozen_f)[static_cast<std::size_t>(cell) * nq + qp];
    };
    return fl;
}

FrozenLinearization hjb_freeze(const CoefficientSet& coeffs,
                               const std::shared_ptr<const ControlField>& controls,
                               double theta) {
    FrozenLinearization fl;
    fl.ctx.theta = theta;
    fl.ctx.coeffs = [coeffs, controls](int cell, int qp, Vec2 x) {
        const double a = controls->at(cell, qp);
        return PointCoefficients{coeffs.A(x, a), coeffs.b(x, a), coeffs.c(x, a)};
    };
    fl.load = [coeffs, controls](int cell, int qp, Vec2 x) {
        return coeffs.f(x, controls->at(cell, qp));
    };
    return fl;
}

double increment_norm(const LsqResult& next, const LsqResult& cur, int quad_degree) {
    return pair_y_norm(difference(next.u, cur.u), difference(next.g, cur.g), quad_degree);
}

// three consecutive strictly growing increments
bool detect_divergence(const std::vector<double>& inc) {
    const std::size_t n = inc.size();
    if (n < 4) return false;
    return inc[n - 1] > inc[n - 2] && inc[n - 2] > inc[n - 3] && inc[n - 3] > inc[n - 4];
}

}  // namespace

LsqResult solve_linear_lsq(const FeSpace& space_u, const FeSpace& space_g,
                           const ThetaOperatorContext& ctx, const LoadField& f,
                           const NewtonConfig& cfg) {
    const int qd = resolve_quad_degree(space_u, cfg.quad_degree);
    SparseSymSystem sys = assemble_system(space_u, space_g, ctx, f, qd);
    LsqResult out;
    const std::vector<double> x = pcg_solve(sys.matrix, sys.rhs, cfg.linear_rel_tol,
                                            cfg.linear_max_iter, cfg.precond, &out.stats);
    split_solution(x, space_u, space_g, sys.partition, out.u, out.g);
    return out;
}

LsqResult ma_initial_guess(const FeSpace& space_u, const FeSpace& space_g,
                           const std::function<double(Vec2)>& f, const NewtonConfig& cfg) {
    const TriangleMesh& mesh = *space_u.mesh;
    const int qd = resolve_quad_degree(space_u, cfg.quad_degree);
    const QuadratureRule rule = triangle_quadrature(qd);
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
        const CellMap map = mesh.cell_map(cell);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double v = f(map.point(rule.ref_point(q)));
            if (!(v > 0.0))
                throw Error("ma_initial_guess: f <= 0 at a quadrature point (f = " +
                            std::to_string(v) + ")");
        }
    }
    ThetaOperatorContext ctx;
    ctx.theta = cfg.theta;
    ctx.coeffs = [](int, int, Vec2) {
        return PointCoefficients{Mat2::identity(), Vec2{0.0, 0.0}, 0.0};
    };
    const LoadField load = [f](int, int, Vec2 x) { return 2.0 * std::sqrt(f(x)); };
    return solve_linear_lsq(space_u, space_g, ctx, load, cfg);
}

LsqResult ma_newton_step(const FeFunction& u_n, const FeFunction& g_n,
                         const std::function<double(Vec2)>& f, const NewtonConfig& cfg,
                         double* min_eig) {
    const FeSpace& space_u = *u_n.space;
    const FeSpace& space_g = *g_n.space;
    const int qd = resolve_quad_degree(space_u, cfg.quad_degree);
    const FrozenLinearization fl = ma_freeze(g_n, f, cfg.theta, qd, min_eig);
    return solve_linear_lsq(space_u, space_g, fl.ctx, fl.load, cfg);
}

ControlField hjb_select_control(const FeFunction& u_n, const FeFunction& g_n,
                                const CoefficientSet& coeffs, const NewtonConfig& cfg,
                                double* frozen_eps) {
    const FeSpace& space_u = *u_n.space;
    const TriangleMesh& mesh = *space_u.mesh;
    const int qd = resolve_quad_degree(space_u, cfg.quad_degree);
    const QuadratureRule rule = triangle_quadrature(qd);
    const std::vector<Vec2> pts = rule_points(rule);
    const int nq = static_cast<int>(rule.size());
    const int na = std::max(cfg.n_alpha, 2);

    std::vector<double> grid(na);
    for (int i = 0; i < na; ++i)
        grid[i] = coeffs.alpha_lo + (coeffs.alpha_hi - coeffs.alpha_lo) * i / (na - 1.0);

    ControlField field;
    field.n_qp = nq;
    field.values.assign(static_cast<std::size_t>(mesh.n_cells()) * nq, coeffs.alpha_lo);

    std::vector<double> cell_eps(mesh.n_cells(), 1e300);
    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        const CellMap map = mesh.cell_map(cell);
        const ScalarEval ue = evaluate_scalar(u_n, cell, pts);
        const VectorEval ge = evaluate_vector(g_n, cell, pts);
        for (int q = 0; q < nq; ++q) {
            const Vec2 x = map.point(pts[q]);
            double best_value = -1e300;
            double best_alpha = grid[0];
            for (int i = 0; i < na; ++i) {
                const double a = grid[i];
                const double value = coeffs.A(x, a).ddot(ge.jacobians[q]) +
                                     coeffs.b(x, a).dot(ge.values[q]) -
                                     coeffs.c(x, a) * ue.values[q] - coeffs.f(x, a);
                if (value > best_value) {  // ties keep the smallest alpha
                    best_value = value;
                    best_alpha = a;
                }
            }
            field.at(cell, q) = best_alpha;

            // Cordes margin of the frozen coefficients at the problem lambda
            const Mat2 a_sel = coeffs.A(x, best_alpha);
            const double c_sel = coeffs.c(x, best_alpha);
            const double bsq = coeffs.b(x, best_alpha).norm_sq();
            const double lam = coeffs.lambda > 0.0 ? coeffs.lambda : 1.0;
            const double den = a_sel.trace() + c_sel / lam;
            if (den > 0.0) {
                const double ratio = (a_sel.frobenius_sq() + bsq / (2.0 * lam) +
                                      (c_sel / lam) * (c_sel / lam)) /
                                     (den * den);
                cell_eps[ci] = std::min(cell_eps[ci], 1.0 / ratio - 2.0);
            } else {
                cell_eps[ci] = -1e300;
            }
        }
    });
    if (frozen_eps) {
        double worst = 1e300;
        for (double e : cell_eps) worst = std::min(worst, e);
        *frozen_eps = worst;
    }
    return field;
}

LsqResult hjb_newton_step(const FeSpace& space_u, const FeSpace& space_g,
                          const CoefficientSet& coeffs,
                          const std::shared_ptr<const ControlField>& controls,
                          const NewtonConfig& cfg) {
    const FrozenLinearization fl = hjb_freeze(coeffs, controls, cfg.theta);
    return solve_linear_lsq(space_u, space_g, fl.ctx, fl.load, cfg);
}

NewtonResult newton_solve(const ProblemSpec& problem, const TriangleMesh& mesh,
                          const NewtonConfig& cfg) {
    auto spaces = std::make_shared<SpacePair>();
    spaces->u_space = build_space(mesh, cfg.degree, 1, Constraint::zero_trace);
    spaces->g_space = build_space(mesh, cfg.degree, 2, cfg.g_constraint);
    const FeSpace& su = spaces->u_space;
    const FeSpace& sg = spaces->g_space;

    NewtonConfig local = cfg;
    local.quad_degree = resolve_quad_degree(su, cfg.quad_degree);
    const int qd = local.quad_degree;

    NewtonResult res;
    res.spaces = spaces;
    res.quad_degree = qd;
    res.n_free_dofs = make_partition(su, sg).n_free();

    if (problem.kind == ProblemSpec::Kind::linear) {
        const ThetaOperatorContext ctx =
            ThetaOperatorContext::from_set(problem.coeffs, cfg.theta, problem.coeffs.alpha_lo);
        const CoefficientSet cs = problem.coeffs;
        const LoadField load = [cs](int, int, Vec2 x) { return cs.f(x, cs.alpha_lo); };
        LsqResult sol = solve_linear_lsq(su, sg, ctx, load, local);
        res.u = std::move(sol.u);
        res.g = std::move(sol.g);
        res.trace.iterations = 1;
        res.trace.converged = sol.stats.converged;
        res.trace.linear_iterations.push_back(sol.stats.iterations);
        res.trace.energies.push_back(assemble_energy(ctx, res.u, res.g, load, qd));
        res.final_ctx = ctx;
        res.final_load = load;
        return res;
    }

    if (problem.kind == ProblemSpec::Kind::monge_ampere) {
        if (!problem.f_ma) throw Error("newton_solve: MA problem without right-hand side");
        LsqResult cur = ma_initial_guess(su, sg, problem.f_ma, local);
        NewtonTrace& trace = res.trace;
        for (int n = 1; n <= local.max_iter; ++n) {
            double min_eig = 0.0;
            const FrozenLinearization fl =
                ma_freeze(cur.g, problem.f_ma, local.theta, qd, &min_eig);
            LsqResult next = solve_linear_lsq(su, sg, fl.ctx, fl.load, local);
            const double inc = increment_norm(next, cur, qd);
            trace.increments.push_back(inc);
            trace.min_hessian_eig.push_back(min_eig);
            trace.linear_iterations.push_back(next.stats.iterations);
            trace.energies.push_back(assemble_energy(fl.ctx, next.u, next.g, fl.load, qd));
            cur = std::move(next);
            trace.iterations = n;
            if (inc < local.tol) {
                trace.converged = true;
                break;
            }
            if (detect_divergence(trace.increments)) {
                trace.diverged = true;
                break;
            }
        }
        res.u = std::move(cur.u);
        res.g = std::move(cur.g);
        const FrozenLinearization fin = ma_freeze(res.g, problem.f_ma, local.theta, qd, nullptr);
        res.final_ctx = fin.ctx;
        res.final_load = fin.load;
        return res;
    }

    // HJB: q0 = alpha_lo everywhere gives the initial iterate, then the
    // semismooth loop alternates control selection and a frozen linear solve
    const CoefficientSet& coeffs = problem.coeffs;
    const QuadratureRule rule = triangle_quadrature(qd);
    auto q_prev = std::make_shared<ControlField>();
    q_prev->n_qp = static_cast<int>(rule.size());
    q_prev->values.assign(static_cast<std::size_t>(mesh.n_cells()) * q_prev->n_qp,
                          coeffs.alpha_lo);

    LsqResult cur = hjb_newton_step(su, sg, coeffs, q_prev, local);
    NewtonTrace& trace = res.trace;
    trace.frozen_cordes_eps = 1e300;
    std::shared_ptr<const ControlField> q_final = q_prev;
    for (int n = 1; n <= local.max_iter; ++n) {
        double frozen_eps = 0.0;
        auto q_new = std::make_shared<ControlField>(
            hjb_select_control(cur.u, cur.g, coeffs, local, &frozen_eps));
        trace.frozen_cordes_eps = std::min(trace.frozen_cordes_eps, frozen_eps);
        if (local.strict_cordes && frozen_eps < kCordesMinEps)
            throw Error("hjb_newton_step: frozen coefficients fail the Cordes margin (eps = " +
                        std::to_string(frozen_eps) + ")");
        std::size_t unchanged = 0;
        for (std::size_t i = 0; i < q_new->values.size(); ++i)
            if (q_new->values[i] == q_prev->values[i]) ++unchanged;
        trace.control_stability.push_back(static_cast<double>(unchanged) /
                                          static_cast<double>(q_new->values.size()));

        const FrozenLinearization fl = hjb_freeze(coeffs, q_new, local.theta);
        LsqResult next = solve_linear_lsq(su, sg, fl.ctx, fl.load, local);
        const double inc = increment_norm(next, cur, qd);
        trace.increments.push_back(inc);
        trace.linear_iterations.push_back(next.stats.iterations);
        trace.energies.push_back(assemble_energy(fl.ctx, next.u, next.g, fl.load, qd));
        cur = std::move(next);
        q_prev = q_new;
        q_final = q_new;
        trace.iterations = n;
        if (inc < local.tol) {
            trace.converged = true;
            break;
        }
        if (detect_divergence(trace.increments)) {
            trace.diverged = true;
            break;
        }
    }
    res.u = std::move(cur.u);
    res.g = std::move(cur.g);
    const FrozenLinearization fin = hjb_freeze(coeffs, q_final, local.theta);
    res.final_ctx = fin.ctx;
    res.final_load = fin.load;
    return res;
}

}  // namespace ndfem
