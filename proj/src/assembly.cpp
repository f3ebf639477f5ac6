#include "nondivfem/assembly.hpp"

#include <cmath>

#include "nondivfem/quadrature.hpp"
#include "nondivfem/shapes.hpp"

namespace ndfem {

double apply_Mtheta(double theta, const PointCoefficients& pc, double phi_val,
                    const Vec2& grad_phi, const Vec2& psi_val, const Mat2& dpsi) {
    return pc.A.ddot(dpsi) + pc.b.dot(psi_val * theta + grad_phi * (1.0 - theta)) -
           pc.c * phi_val;
}

DofPartition make_partition(const FeSpace& space_u, const FeSpace& space_g) {
    DofPartition part;
    part.n_u_dofs = space_u.n_dofs();
    part.n_g_dofs = space_g.n_dofs();
    part.u_free.assign(part.n_u_dofs, -1);
    part.g_free.assign(part.n_g_dofs, -1);
    for (int d = 0; d < part.n_u_dofs; ++d)
        if (!space_u.dof_constrained[d]) part.u_free[d] = part.n_u_free++;
    for (int d = 0; d < part.n_g_dofs; ++d)
        if (!space_g.dof_constrained[d]) part.g_free[d] = part.n_g_free++;
    return part;
}

SparseSymSystem assemble_system(const FeSpace& space_u, const FeSpace& space_g,
                                const ThetaOperatorContext& ctx, const LoadField& f,
                                int quad_degree) {
    if (space_u.mesh != space_g.mesh) throw Error("assemble_system: meshes differ");
    if (space_u.value_dim != 1 || space_g.value_dim != 2)
        throw Error("assemble_system: expected scalar u-space and vector g-space");
    const TriangleMesh& mesh = *space_u.mesh;
    const int k = std::max(space_u.degree, space_g.degree);
    if (quad_degree <= 0) quad_degree = 2 * k + 2;
    const QuadratureRule rule = triangle_quadrature(quad_degree);

    SparseSymSystem sys;
    sys.partition = make_partition(space_u, space_g);
    sys.quad_degree = quad_degree;
    const DofPartition& part = sys.partition;
    const int n = part.n_free();
    sys.rhs.assign(n, 0.0);

    const int nu = space_u.n_local_nodes();
    const int ng = space_g.n_local_nodes();
    const int nloc = nu + 2 * ng;

    struct CellWork {
        std::vector<double> matrix;  // nloc x nloc
        std::vector<double> load;    // nloc
    };
    std::vector<CellWork> work(mesh.n_cells());

    const std::size_t nq = rule.size();
    std::vector<Vec2> ref_pts(nq);
    for (std::size_t q = 0; q < nq; ++q) ref_pts[q] = rule.ref_point(q);

    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        CellWork& w = work[ci];
        w.matrix.assign(static_cast<std::size_t>(nloc) * nloc, 0.0);
        w.load.assign(nloc, 0.0);

        const CellMap map = mesh.cell_map(cell);
        std::array<double, 6> nu_vals, ng_vals;
        std::array<Vec2, 6> gu_ref, gg_ref;

        std::vector<Vec2> grad_term(nloc);
        std::vector<double> rot_term(nloc), m_term(nloc);

        for (std::size_t q = 0; q < nq; ++q) {
            const Vec2 ref = ref_pts[q];
            const Mat2 jac = map.jacobian(ref);
            const double detj = jac.det();
            const double wq = rule.weights[q] * std::abs(detj);
            const Vec2 x = map.point(ref);
            const Mat2 jinv_t = jac.inverse().transpose();
            const PointCoefficients pc = ctx.coeffs(cell, static_cast<int>(q), x);
            const double fq = f(cell, static_cast<int>(q), x);

            shape_values(space_u.degree, ref, nu_vals);
            shape_gradients(space_u.degree, ref, gu_ref);
            shape_values(space_g.degree, ref, ng_vals);
            shape_gradients(space_g.degree, ref, gg_ref);

            // u-block basis: (phi_i, 0)
            for (int i = 0; i < nu; ++i) {
                const Vec2 grad = jinv_t * gu_ref[i];
                grad_term[i] = grad;
                rot_term[i] = 0.0;
                m_term[i] = pc.b.dot(grad) * (1.0 - ctx.theta) - pc.c * nu_vals[i];
            }
            // g-block basis: (0, e_comp N_j); rot(e1 N) = -d2 N, rot(e2 N) = d1 N
            for (int j = 0; j < ng; ++j) {
                const Vec2 grad = jinv_t * gg_ref[j];
                const double val = ng_vals[j];
                for (int comp = 0; comp < 2; ++comp) {
                    const int a = nu + 2 * j + comp;
                    grad_term[a] = comp == 0 ? Vec2{-val, 0.0} : Vec2{0.0, -val};
                    rot_term[a] = comp == 0 ? -grad.y : grad.x;
                    m_term[a] = pc.A.row(comp).dot(grad) +
                                ctx.theta * (comp == 0 ? pc.b.x : pc.b.y) * val;
                }
            }

            for (int a = 0; a < nloc; ++a) {
                const Vec2 ga = grad_term[a];
                const double ra = rot_term[a], ma = m_term[a];
                w.load[a] += wq * fq * ma;
                double* row = w.matrix.data() + static_cast<std::size_t>(a) * nloc;
                for (int b = a; b < nloc; ++b) {
                    row[b] += wq * (ga.dot(grad_term[b]) + ra * rot_term[b] + ma * m_term[b]);
                }
            }
        }
        // mirror the upper triangle
        for (int a = 0; a < nloc; ++a)
            for (int b = 0; b < a; ++b)
                w.matrix[static_cast<std::size_t>(a) * nloc + b] =
                    w.matrix[static_cast<std::size_t>(b) * nloc + a];
    });

    // ordered scatter keeps the global sums deterministic
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.n_cells()) * nloc * nloc);
    std::vector<int> free_idx(nloc);
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
        for (int i = 0; i < nu; ++i)
            free_idx[i] = part.u_free[space_u.cell_node(cell, i)];
        for (int j = 0; j < ng; ++j) {
            const int node = space_g.cell_node(cell, j);
            const int base = part.g_free[2 * node] ;
            free_idx[nu + 2 * j] = base == -1 ? -1 : part.n_u_free + base;
            const int base2 = part.g_free[2 * node + 1];
            free_idx[nu + 2 * j + 1] = base2 == -1 ? -1 : part.n_u_free + base2;
        }
        const CellWork& w = work[cell];
        for (int a = 0; a < nloc; ++a) {
            const int ia = free_idx[a];
            if (ia < 0) continue;
            sys.rhs[ia] += w.load[a];
            for (int b = 0; b < nloc; ++b) {
                const int ib = free_idx[b];
                if (ib < 0) continue;
                triplets.push_back({ia, ib, w.matrix[static_cast<std::size_t>(a) * nloc + b]});
            }
        }
    }
    sys.matrix = CsrMatrix::from_triplets(n, std::move(triplets));
    return sys;
}

void split_solution(const std::vector<double>& x, const FeSpace& space_u,
                    const FeSpace& space_g, const DofPartition& part, FeFunction& u,
                    FeFunction& g) {
    u = FeFunction(space_u);
    g = FeFunction(space_g);
    for (int d = 0; d < part.n_u_dofs; ++d)
        if (part.u_free[d] >= 0) u.coeffs[d] = x[part.u_free[d]];
    for (int d = 0; d < part.n_g_dofs; ++d)
        if (part.g_free[d] >= 0) g.coeffs[d] = x[part.n_u_free + part.g_free[d]];
}

double assemble_energy(const ThetaOperatorContext& ctx, const FeFunction& u,
                       const FeFunction& g, const LoadField& f, int quad_degree) {
    const FeSpace& su = *u.space;
    const FeSpace& sg = *g.space;
    if (su.mesh != sg.mesh) throw Error("assemble_energy: meshes differ");
    const TriangleMesh& mesh = *su.mesh;
    const int k = std::max(su.degree, sg.degree);
    if (quad_degree <= 0) quad_degree = 2 * k + 2;
    const QuadratureRule rule = triangle_quadrature(quad_degree);

    std::vector<Vec2> ref_pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) ref_pts[q] = rule.ref_point(q);

    std::vector<double> cell_sum(mesh.n_cells(), 0.0);
    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        const CellMap map = mesh.cell_map(cell);
        const ScalarEval ue = evaluate_scalar(u, cell, ref_pts);
        const VectorEval ge = evaluate_vector(g, cell, ref_pts);
        KahanSum sum;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 ref = ref_pts[q];
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
        cell_sum[ci] = sum.value();
    });

    KahanSum total;
    for (double v : cell_sum) total.add(v);
    return total.value();
}

}  // namespace ndfem
