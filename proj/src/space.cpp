#include "nondivfem/space.hpp"

#include <algorithm>
#include <cmath>

#include "nondivfem/shapes.hpp"

namespace ndfem {

int FeSpace::cell_node(int cell, int local) const {
    if (local < 3) return mesh->cells[cell][local];
    return mesh->n_vertices() + mesh->cell_edges[cell][local - 3];
}

std::vector<std::pair<int, int>> FeSpace::node_owner() const {
    std::vector<std::pair<int, int>> owner(n_scalar_nodes, {-1, -1});
    for (int c = 0; c < mesh->n_cells(); ++c)
        for (int l = 0; l < n_local_nodes(); ++l) {
            const int node = cell_node(c, l);
            if (owner[node].first == -1) owner[node] = {c, l};
        }
    return owner;
}

namespace {

void constrain_tangential(const TriangleMesh& mesh, FeSpace& space) {
    if (mesh.domain != DomainKind::polygon)
        throw Error("zero tangential trace requires a straight-sided polygon domain");
    // per boundary node: constrain the component parallel to each adjacent
    // boundary edge; only axis-aligned edges are supported
    std::vector<std::array<bool, 2>> lock(space.n_scalar_nodes, {false, false});
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!mesh.edge_on_boundary[e]) continue;
        const Vec2 a = mesh.vertices[mesh.edge_vertices[e][0]];
        const Vec2 b = mesh.vertices[mesh.edge_vertices[e][1]];
        const Vec2 t = b - a;
        int comp;
        if (std::abs(t.y) <= 1e-14 * std::abs(t.x))
            comp = 0;  // horizontal edge: tangent is e1
        else if (std::abs(t.x) <= 1e-14 * std::abs(t.y))
            comp = 1;  // vertical edge: tangent is e2
        else
            throw Error("zero tangential trace supported only for axis-aligned edges");
        lock[mesh.edge_vertices[e][0]][comp] = true;
        lock[mesh.edge_vertices[e][1]][comp] = true;
        if (space.degree == 2) lock[mesh.n_vertices() + e][comp] = true;
    }
    for (int n = 0; n < space.n_scalar_nodes; ++n)
        for (int c = 0; c < 2; ++c)
            if (lock[n][c]) space.dof_constrained[2 * n + c] = true;
}

}  // namespace

FeSpace build_space(const TriangleMesh& mesh, int degree, int value_dim,
                    Constraint constraint) {
    if (degree != 1 && degree != 2)
        throw Error("build_space: unsupported degree " + std::to_string(degree));
    if (value_dim != 1 && value_dim != 2)
        throw Error("build_space: value_dim must be 1 or 2");
    if (constraint == Constraint::zero_tangential_trace && value_dim != 2)
        throw Error("build_space: tangential trace applies to vector spaces");

    FeSpace space;
    space.mesh = &mesh;
    space.degree = degree;
    space.value_dim = value_dim;
    space.constraint = constraint;
    space.n_scalar_nodes = mesh.n_vertices() + (degree == 2 ? mesh.n_edges() : 0);

    space.node_coords.resize(space.n_scalar_nodes);
    space.node_on_boundary.assign(space.n_scalar_nodes, false);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        space.node_coords[v] = mesh.vertices[v];
        space.node_on_boundary[v] = mesh.vertex_on_boundary[v];
    }
    if (degree == 2) {
        const bool snap = mesh.geometry_order == 2;
        for (int e = 0; e < mesh.n_edges(); ++e) {
            space.node_coords[mesh.n_vertices() + e] = mesh.edge_midpoint(e, snap);
            space.node_on_boundary[mesh.n_vertices() + e] = mesh.edge_on_boundary[e];
        }
    }

    space.dof_constrained.assign(space.n_dofs(), false);
    if (constraint == Constraint::zero_trace) {
        for (int n = 0; n < space.n_scalar_nodes; ++n)
            if (space.node_on_boundary[n])
                for (int c = 0; c < value_dim; ++c)
                    space.dof_constrained[n * value_dim + c] = true;
    } else if (constraint == Constraint::zero_tangential_trace) {
        constrain_tangential(mesh, space);
    }
    for (int d = 0; d < space.n_dofs(); ++d)
        if (space.dof_constrained[d]) space.boundary_dofs.push_back(d);

    return space;
}

FeFunction interpolate(const FeSpace& space, const std::function<double(Vec2)>& field) {
    if (space.value_dim != 1) throw Error("interpolate: scalar field on vector space");
    FeFunction fn(space);
    for (int n = 0; n < space.n_scalar_nodes; ++n) {
        const double v = field(space.node_coords[n]);
        if (!std::isfinite(v)) throw Error("interpolate: non-finite field value at a dof");
        fn.coeffs[n] = v;
    }
    apply_constraints(fn);
    return fn;
}

FeFunction interpolate(const FeSpace& space, const std::function<Vec2(Vec2)>& field) {
    if (space.value_dim != 2) throw Error("interpolate: vector field on scalar space");
    FeFunction fn(space);
    for (int n = 0; n < space.n_scalar_nodes; ++n) {
        const Vec2 v = field(space.node_coords[n]);
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw Error("interpolate: non-finite field value at a dof");
        fn.coeffs[2 * n] = v.x;
        fn.coeffs[2 * n + 1] = v.y;
    }
    apply_constraints(fn);
    return fn;
}

void apply_constraints(FeFunction& fn) {
    for (int d : fn.space->boundary_dofs) fn.coeffs[d] = 0.0;
}

namespace {

void check_ref_point(const Vec2& p) {
    const double tol = 1e-12;
    if (p.x < -tol || p.y < -tol || p.x + p.y > 1.0 + tol)
        throw Error("evaluate: point outside the reference triangle");
}

}  // namespace

ScalarEval evaluate_scalar(const FeFunction& fn, int cell, const std::vector<Vec2>& ref_points) {
    const FeSpace& space = *fn.space;
    if (space.value_dim != 1) throw Error("evaluate_scalar: vector-valued function");
    const CellMap map = space.mesh->cell_map(cell);
    const int nl = space.n_local_nodes();

    ScalarEval out;
    out.values.reserve(ref_points.size());
    out.gradients.reserve(ref_points.size());
    std::array<double, 6> n;
    std::array<Vec2, 6> g;
    for (const Vec2& p : ref_points) {
        check_ref_point(p);
        shape_values(space.degree, p, n);
        shape_gradients(space.degree, p, g);
        const Mat2 jinv_t = map.jacobian(p).inverse().transpose();
        double value = 0.0;
        Vec2 grad{0.0, 0.0};
        for (int l = 0; l < nl; ++l) {
            const double c = fn.coeffs[space.cell_node(cell, l)];
            value += c * n[l];
            grad += (jinv_t * g[l]) * c;
        }
        out.values.push_back(value);
        out.gradients.push_back(grad);
    }
    return out;
}

VectorEval evaluate_vector(const FeFunction& fn, int cell, const std::vector<Vec2>& ref_points) {
    const FeSpace& space = *fn.space;
    if (space.value_dim != 2) throw Error("evaluate_vector: scalar-valued function");
    const CellMap map = space.mesh->cell_map(cell);
    const int nl = space.n_local_nodes();

    VectorEval out;
    out.values.reserve(ref_points.size());
    out.jacobians.reserve(ref_points.size());
    std::array<double, 6> n;
    std::array<Vec2, 6> g;
    for (const Vec2& p : ref_points) {
        check_ref_point(p);
        shape_values(space.degree, p, n);
        shape_gradients(space.degree, p, g);
        const Mat2 jinv_t = map.jacobian(p).inverse().transpose();
        Vec2 value{0.0, 0.0};
        Mat2 jac;
        for (int l = 0; l < nl; ++l) {
            const int node = space.cell_node(cell, l);
            const Vec2 c{fn.coeffs[2 * node], fn.coeffs[2 * node + 1]};
            value += c * n[l];
            const Vec2 grad = jinv_t * g[l];  // physical gradient of N_l
            jac.a11 += c.x * grad.x;
            jac.a12 += c.x * grad.y;
            jac.a21 += c.y * grad.x;
            jac.a22 += c.y * grad.y;
        }
        out.values.push_back(value);
        out.jacobians.push_back(jac);
    }
    return out;
}

}  // namespace ndfem
