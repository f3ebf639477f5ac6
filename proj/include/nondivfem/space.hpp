#ifndef NONDIVFEM_SPACE_HPP
#define NONDIVFEM_SPACE_HPP

#include <functional>
#include <vector>

#include "nondivfem/mesh.hpp"

namespace ndfem {

enum class Constraint {
    none,
    zero_trace,             // all components vanish on the boundary
    zero_tangential_trace,  // tangential component vanishes (straight polygons)
};

// Lagrange P_k space, scalar or R^2-valued, on a TriangleMesh.
// Scalar nodes are numbered vertices first, then edges (P2). A vector dof is
// 2*node + component.
struct FeSpace {
    const TriangleMesh* mesh = nullptr;
    int degree = 1;
    int value_dim = 1;
    Constraint constraint = Constraint::none;

    int n_scalar_nodes = 0;
    std::vector<Vec2> node_coords;
    std::vector<bool> node_on_boundary;
    std::vector<bool> dof_constrained;
    std::vector<int> boundary_dofs;  // the constrained dof ids, ascending

    int n_dofs() const { return n_scalar_nodes * value_dim; }
    int n_local_nodes() const { return degree == 1 ? 3 : 6; }
    int cell_node(int cell, int local) const;

    // one representative (cell, local node) per scalar node
    std::vector<std::pair<int, int>> node_owner() const;
};

FeSpace build_space(const TriangleMesh& mesh, int degree, int value_dim,
                    Constraint constraint);

struct FeFunction {
    const FeSpace* space = nullptr;
    std::vector<double> coeffs;

    FeFunction() = default;
    explicit FeFunction(const FeSpace& s)
        : space(&s), coeffs(static_cast<std::size_t>(s.n_dofs()), 0.0) {}
};

FeFunction interpolate(const FeSpace& space, const std::function<double(Vec2)>& field);
FeFunction interpolate(const FeSpace& space, const std::function<Vec2(Vec2)>& field);

// re-imposes the space's constraint by zeroing constrained coefficients
void apply_constraints(FeFunction& fn);

struct ScalarEval {
    std::vector<double> values;
    std::vector<Vec2> gradients;  // physical coordinates
};
struct VectorEval {
    std::vector<Vec2> values;
    std::vector<Mat2> jacobians;  // D psi, (i,j) = d psi_i / d x_j
};

ScalarEval evaluate_scalar(const FeFunction& fn, int cell, const std::vector<Vec2>& ref_points);
VectorEval evaluate_vector(const FeFunction& fn, int cell, const std::vector<Vec2>& ref_points);

}  // namespace ndfem

#endif
