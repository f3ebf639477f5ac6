#include "nondivfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "nondivfem/shapes.hpp"

namespace ndfem {

namespace {

std::int64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
}

}  // namespace

Vec2 CellMap::point(const Vec2& ref) const {
    if (affine) {
        return nodes[0] + (nodes[1] - nodes[0]) * ref.x + (nodes[2] - nodes[0]) * ref.y;
    }
    std::array<double, 6> n;
    shape_values(2, ref, n);
    Vec2 p{0.0, 0.0};
    for (int i = 0; i < 6; ++i) p += nodes[i] * n[i];
    return p;
}

Mat2 CellMap::jacobian(const Vec2& ref) const {
    if (affine) {
        return Mat2::from_columns(nodes[1] - nodes[0], nodes[2] - nodes[0]);
    }
    std::array<Vec2, 6> g;
    shape_gradients(2, ref, g);
    Mat2 j;
    for (int i = 0; i < 6; ++i) {
        j.a11 += nodes[i].x * g[i].x;
        j.a12 += nodes[i].x * g[i].y;
        j.a21 += nodes[i].y * g[i].x;
        j.a22 += nodes[i].y * g[i].y;
    }
    return j;
}

Vec2 TriangleMesh::edge_midpoint(int edge, bool snap_curved) const {
    const Vec2 a = vertices[edge_vertices[edge][0]];
    const Vec2 b = vertices[edge_vertices[edge][1]];
    Vec2 m = (a + b) * 0.5;
    if (snap_curved && domain == DomainKind::disk && edge_on_boundary[edge]) {
        const Vec2 d = m - disk_center;
        const double len = d.norm();
        if (len > 0.0) m = disk_center + d * (disk_radius / len);
    }
    return m;
}

CellMap TriangleMesh::cell_map(int cell) const {
    CellMap map;
    const auto p = cell_coords(cell);
    map.nodes[0] = p[0];
    map.nodes[1] = p[1];
    map.nodes[2] = p[2];
    bool curved = false;
    for (int k = 0; k < 3; ++k) {
        const int e = cell_edges[cell][k];
        const bool snap = geometry_order == 2;
        const Vec2 m = edge_midpoint(e, snap);
        map.nodes[3 + k] = m;
        const Vec2 straight = (map.nodes[k] + map.nodes[(k + 1) % 3]) * 0.5;
        if ((m - straight).norm() > 1e-14) curved = true;
    }
    map.affine = !curved;
    return map;
}

double TriangleMesh::shape_regularity() const {
    double worst = 1.0;
    for (int c = 0; c < n_cells(); ++c) {
        const auto p = cell_coords(c);
        const double l0 = (p[1] - p[0]).norm();
        const double l1 = (p[2] - p[1]).norm();
        const double l2 = (p[0] - p[2]).norm();
        const double area = cell_area(c);
        const double inradius = 2.0 * area / (l0 + l1 + l2);
        const double diam = std::max({l0, l1, l2});
        worst = std::min(worst, inradius / diam);
    }
    return worst;
}

double TriangleMesh::measure(int quad_degree) const {
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    KahanSum total;
    for (int c = 0; c < n_cells(); ++c) {
        const CellMap map = cell_map(c);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            total.add(rule.weights[q] * std::abs(map.jacobian(rule.ref_point(q)).det()));
        }
    }
    return total.value();
}

void TriangleMesh::finalize() {
    const int nc = n_cells();
    edge_vertices.clear();
    edge_cells.clear();
    cell_edges.assign(nc, {-1, -1, -1});

    std::unordered_map<std::int64_t, int> edge_of;
    edge_of.reserve(static_cast<std::size_t>(nc) * 2);
    for (int c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) {
            const int a = cells[c][k];
            const int b = cells[c][(k + 1) % 3];
            const auto key = edge_key(a, b);
            auto it = edge_of.find(key);
            int e;
            if (it == edge_of.end()) {
                e = static_cast<int>(edge_vertices.size());
                edge_of.emplace(key, e);
                edge_vertices.push_back({std::min(a, b), std::max(a, b)});
                edge_cells.push_back({c, -1});
            } else {
                e = it->second;
                if (edge_cells[e][1] != -1)
                    throw Error("mesh: edge shared by more than two cells");
                edge_cells[e][1] = c;
            }
            cell_edges[c][k] = e;
        }
    }

    edge_on_boundary.assign(edge_vertices.size(), false);
    vertex_on_boundary.assign(vertices.size(), false);
    boundary_edges.clear();
    for (int c = 0; c < nc; ++c) {
        for (int k = 0; k < 3; ++k) {
            const int e = cell_edges[c][k];
            if (edge_cells[e][1] != -1) continue;
            edge_on_boundary[e] = true;
            const int a = cells[c][k];
            const int b = cells[c][(k + 1) % 3];
            // local edges run CCW, so the domain lies on the left of (a, b)
            boundary_edges.push_back({a, b});
            vertex_on_boundary[a] = true;
            vertex_on_boundary[b] = true;
        }
    }

    cell_diameter.assign(nc, 0.0);
    h = 0.0;
    for (int c = 0; c < nc; ++c) {
        const auto p = cell_coords(c);
        const double d = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(),
                                   (p[0] - p[2]).norm()});
        cell_diameter[c] = d;
        h = std::max(h, d);
    }

    if (static_cast<int>(refinement_edge.size()) != nc) {
        refinement_edge.assign(nc, 0);
        for (int c = 0; c < nc; ++c) {
            const auto p = cell_coords(c);
            const double l[3] = {(p[1] - p[0]).norm_sq(), (p[2] - p[1]).norm_sq(),
                                 (p[0] - p[2]).norm_sq()};
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (l[k] > l[best] * (1.0 + 1e-12)) best = k;
            refinement_edge[c] = best;
        }
    }
}

TriangleMesh generate_disk_mesh(Vec2 center, double radius, int initial_resolution,
                                int geometry_order) {
    if (radius <= 0.0) throw Error("generate_disk_mesh: radius must be positive");
    if (initial_resolution < 1) throw Error("generate_disk_mesh: resolution must be >= 1");

    TriangleMesh mesh;
    mesh.domain = DomainKind::disk;
    mesh.disk_center = center;
    mesh.disk_radius = radius;
    mesh.geometry_order = geometry_order;

    const int n = initial_resolution;
    // concentric rings: ring i has 6i vertices at radius i*r/n
    std::vector<int> ring_start(n + 1, 0);
    mesh.vertices.push_back(center);
    for (int i = 1; i <= n; ++i) {
        ring_start[i] = static_cast<int>(mesh.vertices.size());
        const double r = radius * i / n;
        for (int j = 0; j < 6 * i; ++j) {
            const double a = 2.0 * M_PI * j / (6.0 * i);
            mesh.vertices.push_back(center + Vec2{r * std::cos(a), r * std::sin(a)});
        }
    }

    auto ring_vertex = [&](int i, int j) {
        if (i == 0) return 0;
        return ring_start[i] + ((j % (6 * i)) + 6 * i) % (6 * i);
    };

    // ring 1: fan around the center
    for (int j = 0; j < 6; ++j)
        mesh.cells.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
    // ring i >= 2: per sector, an (i)-to-(i-1) strip of 2i-1 triangles
    for (int i = 2; i <= n; ++i) {
        for (int s = 0; s < 6; ++s) {
            for (int t = 0; t < i; ++t) {
                mesh.cells.push_back({ring_vertex(i, s * i + t), ring_vertex(i, s * i + t + 1),
                                      ring_vertex(i - 1, s * (i - 1) + t)});
            }
            for (int t = 0; t + 1 < i; ++t) {
                mesh.cells.push_back({ring_vertex(i - 1, s * (i - 1) + t),
                                      ring_vertex(i, s * i + t + 1),
                                      ring_vertex(i - 1, s * (i - 1) + t + 1)});
            }
        }
    }

    mesh.finalize();
    return mesh;
}

TriangleMesh generate_square_mesh(int n, int geometry_order) {
    if (n < 1) throw Error("generate_square_mesh: resolution must be >= 1");
    TriangleMesh mesh;
    mesh.domain = DomainKind::polygon;
    mesh.geometry_order = geometry_order;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto v = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.cells.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
            mesh.cells.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
        }
    }
    mesh.finalize();
    return mesh;
}

TriangleMesh refine_uniform(const TriangleMesh& mesh) {
    TriangleMesh out;
    out.domain = mesh.domain;
    out.disk_center = mesh.disk_center;
    out.disk_radius = mesh.disk_radius;
    out.geometry_order = mesh.geometry_order;
    out.vertices = mesh.vertices;

    // one new vertex per edge; boundary midpoints land on the circle
    std::vector<int> edge_vertex(mesh.n_edges());
    for (int e = 0; e < mesh.n_edges(); ++e) {
        edge_vertex[e] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.edge_midpoint(e, /*snap_curved=*/true));
    }

    out.cells.reserve(static_cast<std::size_t>(mesh.n_cells()) * 4);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& v = mesh.cells[c];
        const int m01 = edge_vertex[mesh.cell_edges[c][0]];
        const int m12 = edge_vertex[mesh.cell_edges[c][1]];
        const int m20 = edge_vertex[mesh.cell_edges[c][2]];
        out.cells.push_back({v[0], m01, m20});
        out.cells.push_back({m01, v[1], m12});
        out.cells.push_back({m20, m12, v[2]});
        out.cells.push_back({m01, m12, m20});
    }

    out.finalize();
    return out;
}

TriangleMesh refine_marked(const TriangleMesh& mesh, const std::vector<int>& marked) {
    if (marked.empty()) {
        TriangleMesh out = mesh;
        out.closure_sweeps = 0;
        return out;
    }

    const int nc = mesh.n_cells();
    std::vector<bool> edge_marked(mesh.n_edges(), false);
    for (int c : marked) {
        if (c < 0 || c >= nc) throw Error("refine_marked: cell index out of range");
        edge_marked[mesh.cell_edges[c][mesh.refinement_edge[c]]] = true;
    }

    // closure: whenever a cell has any marked edge, its refinement edge must
    // be marked too; the sweep count is the propagation depth
    int sweeps = 0;
    for (bool changed = true; changed; ++sweeps) {
        changed = false;
        for (int c = 0; c < nc; ++c) {
            const auto& e = mesh.cell_edges[c];
            const int re = e[mesh.refinement_edge[c]];
            if (edge_marked[re]) continue;
            if (edge_marked[e[0]] || edge_marked[e[1]] || edge_marked[e[2]]) {
                edge_marked[re] = true;
                changed = true;
            }
        }
        if (sweeps > mesh.n_edges())
            throw Error("refine_marked: bisection closure failed to terminate");
    }

    TriangleMesh out;
    out.domain = mesh.domain;
    out.disk_center = mesh.disk_center;
    out.disk_radius = mesh.disk_radius;
    out.geometry_order = mesh.geometry_order;
    out.closure_sweeps = sweeps;
    out.vertices = mesh.vertices;

    std::vector<int> edge_vertex(mesh.n_edges(), -1);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!edge_marked[e]) continue;
        edge_vertex[e] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.edge_midpoint(e, /*snap_curved=*/true));
    }

    // newest-vertex bisection: children (c, a, m) and (b, c, m) of (a, b, c)
    // keep their refinement edge at local (0,1)
    for (int c = 0; c < nc; ++c) {
        const int l = mesh.refinement_edge[c];
        const int v0 = mesh.cells[c][l];
        const int v1 = mesh.cells[c][(l + 1) % 3];
        const int v2 = mesh.cells[c][(l + 2) % 3];
        const int e01 = mesh.cell_edges[c][l];
        const int e12 = mesh.cell_edges[c][(l + 1) % 3];
        const int e20 = mesh.cell_edges[c][(l + 2) % 3];

        if (!edge_marked[e01]) {
            out.cells.push_back({v0, v1, v2});
            out.refinement_edge.push_back(0);
            continue;
        }
        const int m01 = edge_vertex[e01];
        // left child (v2, v0, m01), right child (v1, v2, m01)
        if (edge_marked[e20]) {
            const int m20 = edge_vertex[e20];
            out.cells.push_back({m01, v2, m20});
            out.refinement_edge.push_back(0);
            out.cells.push_back({v0, m01, m20});
            out.refinement_edge.push_back(0);
        } else {
            out.cells.push_back({v2, v0, m01});
            out.refinement_edge.push_back(0);
        }
        if (edge_marked[e12]) {
            const int m12 = edge_vertex[e12];
            out.cells.push_back({m01, v1, m12});
            out.refinement_edge.push_back(0);
            out.cells.push_back({v2, m01, m12});
            out.refinement_edge.push_back(0);
        } else {
            out.cells.push_back({v1, v2, m01});
            out.refinement_edge.push_back(0);
        }
    }

    out.finalize();
    return out;
}

void audit_conformity(const TriangleMesh& mesh) {
    for (int c = 0; c < mesh.n_cells(); ++c) {
        if (mesh.cell_area(c) <= 0.0)
            throw Error("conformity: cell " + std::to_string(c) + " has non-positive area");
    }
    std::map<std::pair<int, int>, int> edge_count;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh.cells[c][k], b = mesh.cells[c][(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[{a, b}] += 1;
        }
    }
    int n_boundary = 0;
    for (const auto& [e, n] : edge_count) {
        if (n == 1)
            ++n_boundary;
        else if (n != 2)
            throw Error("conformity: edge shared by " + std::to_string(n) + " cells");
    }
    if (n_boundary != static_cast<int>(mesh.boundary_edges.size()))
        throw Error("conformity: boundary edge table inconsistent");

    // hanging-node audit: a midpoint of an interior edge must not be a vertex
    // of any cell adjacent to that edge's endpoints unless the edge is split
    // in both cells, which the edge-count check above already enforces.

    if (mesh.domain == DomainKind::disk) {
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            if (!mesh.vertex_on_boundary[v]) continue;
            const double r = (mesh.vertices[v] - mesh.disk_center).norm();
            if (std::abs(r - mesh.disk_radius) > 1e-12)
                throw Error("conformity: boundary vertex off the circle by " +
                            std::to_string(std::abs(r - mesh.disk_radius)));
        }
    }
}

}  // namespace ndfem
