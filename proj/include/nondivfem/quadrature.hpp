#ifndef NONDIVFEM_QUADRATURE_HPP
#define NONDIVFEM_QUADRATURE_HPP

#include <array>
#include <vector>

#include "nondivfem/core.hpp"

namespace ndfem {

// Quadrature rule on the reference triangle {(x,y) : x,y >= 0, x+y <= 1}.
// Points are stored barycentric, weights sum to the reference area 1/2.
struct QuadratureRule {
    int degree = 0;
    std::vector<std::array<double, 3>> points;  // (l0, l1, l2), l0 = 1-x-y
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    Vec2 ref_point(std::size_t q) const { return {points[q][1], points[q][2]}; }
};

// Gauss-Legendre nodes/weights on [0,1]; weights sum to 1.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Rule exact for total degree <= `degree`, 1 <= degree <= 10.
// Built as a collapsed (Duffy) tensor Gauss product, so exactness follows
// from the 1D Gauss order; all weights are positive.
QuadratureRule triangle_quadrature(int degree);

}  // namespace ndfem

#endif
