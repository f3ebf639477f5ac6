#ifndef NONDIVFEM_TESTS_HELPERS_HPP
#define NONDIVFEM_TESTS_HELPERS_HPP

#include <cstdint>

#include "nondivfem/core.hpp"

namespace ndfem::testing {

// deterministic generator for property-style tests
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed * 2654435761u + 1) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        const double u = static_cast<double>(state_ >> 11) / 9007199254740992.0;
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        const int span = hi - lo + 1;
        int v = static_cast<int>(uniform(0.0, static_cast<double>(span)));
        if (v >= span) v = span - 1;
        return lo + v;
    }
    Vec2 point_in_disk(double radius = 1.0) {
        for (;;) {
            const Vec2 p{uniform(-radius, radius), uniform(-radius, radius)};
            if (p.norm() < radius) return p;
        }
    }
    Mat2 sym_matrix(double lo, double hi) {
        const double off = uniform(lo, hi);
        return Mat2{uniform(lo, hi), off, off, uniform(lo, hi)};
    }

  private:
    std::uint64_t state_;
};

}  // namespace ndfem::testing

#endif
