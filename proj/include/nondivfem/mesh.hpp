#ifndef NONDIVFEM_MESH_HPP
#define NONDIVFEM_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "nondivfem/core.hpp"
#include "nondivfem/quadrature.hpp"

namespace ndfem {

enum class DomainKind { disk, polygon };

// Geometric map of one cell: affine for straight cells, quadratic
// isoparametric for boundary cells of a geometry_order-2 mesh. Node order is
// (v0, v1, v2, m01, m12, m20).
struct CellMap {
    bool affine = true;
    std::array<Vec2, 6> nodes{};

    Vec2 point(const Vec2& ref) const;
    Mat2 jacobian(const Vec2& ref) const;
};

// Conforming triangulation. Immutable after construction: the refinement
// operations return a new mesh.
struct TriangleMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;  // CCW vertex triples
    // per cell: local refinement edge k, meaning edge (v_k, v_{k+1 mod 3})
    std::vector<int> refinement_edge;

    int geometry_order = 1;  // 1 = straight edges, 2 = quadratic boundary edges
    DomainKind domain = DomainKind::disk;
    Vec2 disk_center{0.0, 0.0};
    double disk_radius = 1.0;

    // derived connectivity, built by finalize()
    std::vector<std::array<int, 2>> edge_vertices;   // (lo, hi)
    std::vector<std::array<int, 2>> edge_cells;      // adjacent cells, -1 if none
    std::vector<std::array<int, 3>> cell_edges;      // global edge per local edge
    std::vector<std::array<int, 2>> boundary_edges;  // oriented, domain on the left
    std::vector<bool> vertex_on_boundary;
    std::vector<bool> edge_on_boundary;
    std::vector<double> cell_diameter;  // h_K
    double h = 0.0;                     // max_K h_K
    int closure_sweeps = 0;             // bisection-closure propagation count

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_edges() const { return static_cast<int>(edge_vertices.size()); }

    std::array<Vec2, 3> cell_coords(int cell) const {
        const auto& c = cells[cell];
        return {vertices[c[0]], vertices[c[1]], vertices[c[2]]};
    }
    double cell_area(int cell) const {
        const auto p = cell_coords(cell);
        return 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    }
    Vec2 cell_centroid(int cell) const {
        const auto p = cell_coords(cell);
        return (p[0] + p[1] + p[2]) / 3.0;
    }
    bool cell_touches_boundary(int cell) const {
        const auto& e = cell_edges[cell];
        return edge_on_boundary[e[0]] || edge_on_boundary[e[1]] || edge_on_boundary[e[2]];
    }

    // midpoint of a global edge; snapped to the circle for boundary edges of
    // a disk mesh when curved geometry is requested
    Vec2 edge_midpoint(int edge, bool snap_curved) const;
    CellMap cell_map(int cell) const;

    // min over cells of inradius / diameter
    double shape_regularity() const;
    // integral of |det J| over all cells (measures the discrete domain)
    double measure(int quad_degree = 4) const;

    void finalize();  // rebuilds the derived tables
};

TriangleMesh generate_disk_mesh(Vec2 center, double radius, int initial_resolution,
                                int geometry_order = 1);
// structured triangulation of the unit square [0,1]^2, n x n quads split in two
TriangleMesh generate_square_mesh(int n, int geometry_order = 1);

// red refinement (1 -> 4 similar cells); curved boundary midpoints snapped
TriangleMesh refine_uniform(const TriangleMesh& mesh);
// newest-vertex bisection of `marked` plus conformity closure
TriangleMesh refine_marked(const TriangleMesh& mesh, const std::vector<int>& marked);

// throws Error with a description on the first violated invariant
void audit_conformity(const TriangleMesh& mesh);

}  // namespace ndfem

#endif
