#ifndef NONDIVFEM_NONLINEAR_HPP
#define NONDIVFEM_NONLINEAR_HPP

#include <memory>

#include "nondivfem/assembly.hpp"
#include "nondivfem/problems.hpp"

namespace ndfem {

struct NewtonConfig {
    double tol = 1e-8;  // Y-norm increment threshold
    int max_iter = 8;
    int degree = 2;  // polynomial degree of both spaces
    double theta = 0.5;
    int n_alpha = 64;     // control-grid resolution for HJB
    int quad_degree = 0;  // 0: 2k+2
    double linear_rel_tol = 1e-10;
    int linear_max_iter = 50000;
    Preconditioner precond = Preconditioner::ichol;
    Constraint g_constraint = Constraint::none;  // relaxed recovery space
    bool strict_cordes = false;  // hard-error when frozen fields miss the margin
};

struct NewtonTrace {
    std::vector<double> increments;         // Y-norm per Newton step
    std::vector<double> energies;           // E_theta of each iterate
    std::vector<double> control_stability;  // fraction of unchanged controls
    std::vector<double> min_hessian_eig;    // MA convexity monitor
    std::vector<int> linear_iterations;
    double frozen_cordes_eps = 0.0;  // worst margin of frozen HJB fields
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
};

// selected control per (cell, quadrature point)
struct ControlField {
    int n_qp = 0;
    std::vector<double> values;
    double at(int cell, int qp) const { return values[static_cast<std::size_t>(cell) * n_qp + qp]; }
    double& at(int cell, int qp) { return values[static_cast<std::size_t>(cell) * n_qp + qp]; }
};

// the product space of one solve; NewtonResult keeps it alive because the
// returned FeFunctions point into it
struct SpacePair {
    FeSpace u_space;
    FeSpace g_space;
};

struct NewtonResult {
    std::shared_ptr<SpacePair> spaces;
    FeFunction u;
    FeFunction g;
    NewtonTrace trace;
    // final linearization, reused by the a posteriori indicators
    ThetaOperatorContext final_ctx;
    LoadField final_load;
    int quad_degree = 0;
    long n_free_dofs = 0;
};

// one linear least-squares solve of M_theta(u,g) = f
struct LsqResult {
    FeFunction u;
    FeFunction g;
    SolveStats stats;
};
LsqResult solve_linear_lsq(const FeSpace& space_u, const FeSpace& space_g,
                           const ThetaOperatorContext& ctx, const LoadField& f,
                           const NewtonConfig& cfg);

// initial iterate: laplace u0 = 2 sqrt(f), u0 = 0 on the boundary;
// throws if f <= 0 at a quadrature point
LsqResult ma_initial_guess(const FeSpace& space_u, const FeSpace& space_g,
                           const std::function<double(Vec2)>& f, const NewtonConfig& cfg);

// one MA step: cof(H_n) : D^2 u = f - det H_n + cof(H_n) : H_n with
// H_n = sym(D g_n); throws when H_n loses positive definiteness
LsqResult ma_newton_step(const FeFunction& u_n, const FeFunction& g_n,
                         const std::function<double(Vec2)>& f, const NewtonConfig& cfg,
                         double* min_eig = nullptr);

// argmax_a (A^a : Dg_n + b^a . g_n - c^a u_n - f^a) over the uniform control
// grid, ties resolved towards the smallest alpha
ControlField hjb_select_control(const FeFunction& u_n, const FeFunction& g_n,
                                const CoefficientSet& coeffs, const NewtonConfig& cfg,
                                double* frozen_eps = nullptr);

// one HJB step with coefficients frozen at the selected controls
LsqResult hjb_newton_step(const FeSpace& space_u, const FeSpace& space_g,
                          const CoefficientSet& coeffs,
                          const std::shared_ptr<const ControlField>& controls,
                          const NewtonConfig& cfg);

// full outer iteration for any problem kind on the given mesh
NewtonResult newton_solve(const ProblemSpec& problem, const TriangleMesh& mesh,
                          const NewtonConfig& cfg);

}  // namespace ndfem

#endif
