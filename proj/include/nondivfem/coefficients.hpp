#ifndef NONDIVFEM_COEFFICIENTS_HPP
#define NONDIVFEM_COEFFICIENTS_HPP

#include <functional>

#include "nondivfem/core.hpp"

namespace ndfem {

// Coefficient data of the operator L^a u = A^a : D^2 u + b^a . grad u - c^a u
// with right-hand side f^a. The control argument is ignored for plain linear
// problems (alpha_dependent = false).
struct CoefficientSet {
    std::function<Mat2(Vec2, double)> A;
    std::function<Vec2(Vec2, double)> b;
    std::function<double(Vec2, double)> c;
    std::function<double(Vec2, double)> f;

    bool alpha_dependent = false;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;

    double lambda = 1.0;        // Cordes scaling parameter (<= 0: search)
    double eps_declared = 0.0;  // claimed admissible margin, 0 if none

    static CoefficientSet constant(const Mat2& a, const Vec2& b, double c,
                                   std::function<double(Vec2)> f);
};

inline CoefficientSet CoefficientSet::constant(const Mat2& a, const Vec2& b, double c,
                                               std::function<double(Vec2)> f) {
    CoefficientSet cs;
    cs.A = [a](Vec2, double) { return a; };
    cs.b = [b](Vec2, double) { return b; };
    cs.c = [c](Vec2, double) { return c; };
    cs.f = [fn = std::move(f)](Vec2 x, double) { return fn(x); };
    return cs;
}

}  // namespace ndfem

#endif
