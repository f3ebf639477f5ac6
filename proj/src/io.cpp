#include "nondivfem/io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>

namespace ndfem {

void write_mesh_text(std::ostream& os, const TriangleMesh& mesh) {
    os << std::setprecision(17);
    os << mesh.n_vertices() << '\n';
    for (const Vec2& v : mesh.vertices) os << v.x << ' ' << v.y << '\n';
    os << mesh.n_cells() << '\n';
    for (const auto& c : mesh.cells) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    os << mesh.boundary_edges.size() << '\n';
    for (const auto& e : mesh.boundary_edges) os << e[0] << ' ' << e[1] << '\n';
}

TriangleMesh read_mesh_text(std::istream& is) {
    TriangleMesh mesh;
    int nv = 0;
    if (!(is >> nv)) throw Error("read_mesh_text: missing vertex count");
    mesh.vertices.resize(nv);
    for (int i = 0; i < nv; ++i)
        if (!(is >> mesh.vertices[i].x >> mesh.vertices[i].y))
            throw Error("read_mesh_text: truncated vertex list");
    int nc = 0;
    if (!(is >> nc)) throw Error("read_mesh_text: missing cell count");
    mesh.cells.resize(nc);
    for (int i = 0; i < nc; ++i)
        if (!(is >> mesh.cells[i][0] >> mesh.cells[i][1] >> mesh.cells[i][2]))
            throw Error("read_mesh_text: truncated cell list");
    int nb = 0;
    if (!(is >> nb)) throw Error("read_mesh_text: missing boundary edge count");
    for (int i = 0; i < nb; ++i) {
        int a, b;
        if (!(is >> a >> b)) throw Error("read_mesh_text: truncated boundary list");
    }
    mesh.domain = DomainKind::polygon;  // geometry metadata is not serialized
    mesh.finalize();
    return mesh;
}

void write_matrix_market(std::ostream& os, const CsrMatrix& matrix) {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    std::int64_t nnz_lower = 0;
    for (int r = 0; r < matrix.n; ++r)
        for (std::int64_t k = matrix.row_ptr[r]; k < matrix.row_ptr[r + 1]; ++k)
            if (matrix.col[k] <= r) ++nnz_lower;
    os << matrix.n << ' ' << matrix.n << ' ' << nnz_lower << '\n';
    os << std::setprecision(17);
    for (int r = 0; r < matrix.n; ++r)
        for (std::int64_t k = matrix.row_ptr[r]; k < matrix.row_ptr[r + 1]; ++k)
            if (matrix.col[k] <= r)
                os << r + 1 << ' ' << matrix.col[k] + 1 << ' ' << matrix.val[k] << '\n';
}

void write_trace_header(std::ostream& os) { os << "level,iteration,increment,e_theta\n"; }

void write_trace_csv(std::ostream& os, int level, const NewtonTrace& trace) {
    os << std::setprecision(12);
    for (std::size_t i = 0; i < trace.increments.size(); ++i) {
        const double energy = i < trace.energies.size() ? trace.energies[i] : 0.0;
        os << level << ',' << i + 1 << ',' << trace.increments[i] << ',' << energy << '\n';
    }
    if (trace.increments.empty() && !trace.energies.empty())
        os << level << ",1,0," << trace.energies[0] << '\n';
}

}  // namespace ndfem
