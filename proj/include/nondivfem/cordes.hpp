#ifndef NONDIVFEM_CORDES_HPP
#define NONDIVFEM_CORDES_HPP

#include <string>
#include <vector>

#include "nondivfem/coefficients.hpp"
#include "nondivfem/mesh.hpp"

namespace ndfem {

struct CordesReport {
    bool special_condition = false;  // b = 0 and c = 0: |A|^2/(tr A)^2 bound
    double lambda = 1.0;
    double worst_ratio = 0.0;
    double eps_max = 0.0;  // largest admissible margin, 1/ratio - (d or d-1)
    Vec2 worst_point{0.0, 0.0};
    double worst_alpha = 0.0;
    double nu_min = 0.0;  // smallest sampled eigenvalue of A (ellipticity)
    double symmetry_defect = 0.0;
    bool undefined_denominator = false;  // tr A + c/lambda <= 0 somewhere
    bool pass = false;
    std::size_t n_samples = 0;
    std::size_t n_alpha_samples = 1;

    std::string to_text() const;
    std::string to_csv() const;
};

// minimum admissible margin required to report a pass; problems with a
// vanishing margin (degenerate diffusion) are rejected
constexpr double kCordesMinEps = 1e-3;

// Evaluates the Cordes quotient at every (point, alpha) pair.
// lambda <= 0 requests a golden-section search maximizing eps over
// lambda in [1e-3, 1e3] (only meaningful when b or c is nonzero).
CordesReport check_cordes(const CoefficientSet& coeffs, const std::vector<Vec2>& points,
                          const std::vector<double>& alphas, double lambda);

// quadrature points of the mesh plus a grid x grid tensor lattice on the
// bounding box intersected with the domain interior
std::vector<Vec2> cordes_sample_points(const TriangleMesh& mesh, int quad_degree = 4,
                                       int grid = 64);
std::vector<double> alpha_samples(const CoefficientSet& coeffs, int n);

}  // namespace ndfem

#endif
