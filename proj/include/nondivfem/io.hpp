#ifndef NONDIVFEM_IO_HPP
#define NONDIVFEM_IO_HPP

#include <iosfwd>
#include <string>

#include "nondivfem/mesh.hpp"
#include "nondivfem/nonlinear.hpp"
#include "nondivfem/sparse.hpp"

namespace ndfem {

// Plain-text mesh format:
//   <vertex count>
//   x y                  (one line per vertex)
//   <cell count>
//   i j k                (vertex indices, CCW)
//   <boundary edge count>
//   a b                  (oriented, domain on the left)
void write_mesh_text(std::ostream& os, const TriangleMesh& mesh);
TriangleMesh read_mesh_text(std::istream& is);

// MatrixMarket coordinate format, symmetric (lower triangle stored)
void write_matrix_market(std::ostream& os, const CsrMatrix& matrix);

// trace.csv schema: level,iteration,increment,e_theta
void write_trace_header(std::ostream& os);
void write_trace_csv(std::ostream& os, int level, const NewtonTrace& trace);

}  // namespace ndfem

#endif
