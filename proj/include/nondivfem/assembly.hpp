#ifndef NONDIVFEM_ASSEMBLY_HPP
#define NONDIVFEM_ASSEMBLY_HPP

#include <functional>
#include <vector>

#include "nondivfem/coefficients.hpp"
#include "nondivfem/space.hpp"
#include "nondivfem/sparse.hpp"

namespace ndfem {

// Pointwise coefficients seen by the assembly loop. The (cell, qp) indices
// let Newton steps freeze per-quadrature-point fields (selected controls,
// cofactor matrices) without projecting them onto a space.
struct PointCoefficients {
    Mat2 A;
    Vec2 b;
    double c = 0.0;
};

struct ThetaOperatorContext {
    double theta = 0.5;
    std::function<PointCoefficients(int cell, int qp, Vec2 x)> coeffs;

    static ThetaOperatorContext from_set(const CoefficientSet& cs, double theta,
                                         double alpha = 0.0) {
        ThetaOperatorContext ctx;
        ctx.theta = theta;
        ctx.coeffs = [cs, alpha](int, int, Vec2 x) {
            return PointCoefficients{cs.A(x, alpha), cs.b(x, alpha), cs.c(x, alpha)};
        };
        return ctx;
    }
};

using LoadField = std::function<double(int cell, int qp, Vec2 x)>;

inline LoadField load_from(std::function<double(Vec2)> f) {
    return [fn = std::move(f)](int, int, Vec2 x) { return fn(x); };
}

// M_theta(phi, psi) = A : D psi + b . (theta psi + (1-theta) grad phi) - c phi
double apply_Mtheta(double theta, const PointCoefficients& pc, double phi_val,
                    const Vec2& grad_phi, const Vec2& psi_val, const Mat2& dpsi);

// free-dof bookkeeping of the product space: u block first, then the g block
// interleaved by component
struct DofPartition {
    int n_u_dofs = 0;  // before elimination
    int n_g_dofs = 0;
    std::vector<int> u_free;  // dof -> free index or -1
    std::vector<int> g_free;
    int n_u_free = 0;
    int n_g_free = 0;
    int n_free() const { return n_u_free + n_g_free; }
};

struct SparseSymSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    DofPartition partition;
    int quad_degree = 0;
};

DofPartition make_partition(const FeSpace& space_u, const FeSpace& space_g);

// Assembles a_theta and the load (f, M_theta(.)). quad_degree 0 selects the
// default 2k+2. space_u must carry the zero-trace constraint.
SparseSymSystem assemble_system(const FeSpace& space_u, const FeSpace& space_g,
                                const ThetaOperatorContext& ctx, const LoadField& f,
                                int quad_degree = 0);

// splits a free-dof solution vector into the (u_h, g_h) pair
void split_solution(const std::vector<double>& x, const FeSpace& space_u,
                    const FeSpace& space_g, const DofPartition& part, FeFunction& u,
                    FeFunction& g);

// E_theta(u,g) = |grad u - g|^2 + |rot g|^2 + |M_theta(u,g) - f|^2, all L2
double assemble_energy(const ThetaOperatorContext& ctx, const FeFunction& u,
                       const FeFunction& g, const LoadField& f, int quad_degree = 0);

}  // namespace ndfem

#endif
