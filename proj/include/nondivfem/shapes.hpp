#ifndef NONDIVFEM_SHAPES_HPP
#define NONDIVFEM_SHAPES_HPP

#include <array>

#include "nondivfem/core.hpp"

namespace ndfem {

// Lagrange shape functions on the reference triangle.
// P1 node order: (v0, v1, v2); P2 adds midpoints (m01, m12, m20).

inline int shape_count(int degree) { return degree == 1 ? 3 : 6; }

inline void shape_values(int degree, const Vec2& ref, std::array<double, 6>& n) {
    const double l0 = 1.0 - ref.x - ref.y, l1 = ref.x, l2 = ref.y;
    if (degree == 1) {
        n[0] = l0;
        n[1] = l1;
        n[2] = l2;
        return;
    }
    n[0] = l0 * (2.0 * l0 - 1.0);
    n[1] = l1 * (2.0 * l1 - 1.0);
    n[2] = l2 * (2.0 * l2 - 1.0);
    n[3] = 4.0 * l0 * l1;
    n[4] = 4.0 * l1 * l2;
    n[5] = 4.0 * l2 * l0;
}

inline void shape_gradients(int degree, const Vec2& ref, std::array<Vec2, 6>& g) {
    const Vec2 d0{-1.0, -1.0}, d1{1.0, 0.0}, d2{0.0, 1.0};
    if (degree == 1) {
        g[0] = d0;
        g[1] = d1;
        g[2] = d2;
        return;
    }
    const double l0 = 1.0 - ref.x - ref.y, l1 = ref.x, l2 = ref.y;
    g[0] = d0 * (4.0 * l0 - 1.0);
    g[1] = d1 * (4.0 * l1 - 1.0);
    g[2] = d2 * (4.0 * l2 - 1.0);
    g[3] = (d0 * l1 + d1 * l0) * 4.0;
    g[4] = (d1 * l2 + d2 * l1) * 4.0;
    g[5] = (d2 * l0 + d0 * l2) * 4.0;
}

}  // namespace ndfem

#endif
