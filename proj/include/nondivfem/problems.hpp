#ifndef NONDIVFEM_PROBLEMS_HPP
#define NONDIVFEM_PROBLEMS_HPP

#include <string>

#include "nondivfem/analysis.hpp"
#include "nondivfem/coefficients.hpp"
#include "nondivfem/mesh.hpp"

namespace ndfem {

// A fully specified Dirichlet problem with homogeneous boundary data.
struct ProblemSpec {
    enum class Kind { linear, monge_ampere, hjb };
    enum class Domain { unit_disk, unit_square };

    Kind kind = Kind::linear;
    Domain domain = Domain::unit_disk;
    std::string name;

    CoefficientSet coeffs;             // linear and hjb kinds
    std::function<double(Vec2)> f_ma;  // Monge-Ampere right-hand side, f > 0
    double R = 0.0;                    // ma-R parameter

    ExactSolution exact;
};

// Built-in catalogue: poisson-disk, linear-cordes, ma-R (uses the R
// argument), hjb-aniso, cordes-violating. Throws on unknown names.
ProblemSpec builtin(const std::string& name, double R = std::sqrt(2.0));

// structured problem file with coefficient expressions (see problems/ for
// the documented grammar and two examples)
ProblemSpec load_problem_file(const std::string& path);

TriangleMesh make_mesh(const ProblemSpec& problem, int resolution, int geometry_order);

// pointwise residual of the exact solution in its own PDE: |Lu - f| for
// linear, |det D^2 u - f| for MA, |sup_a (L^a u - f^a)| for HJB
double pde_residual(const ProblemSpec& problem, Vec2 x, int alpha_grid = 257);

}  // namespace ndfem

#endif
