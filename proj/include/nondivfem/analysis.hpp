#ifndef NONDIVFEM_ANALYSIS_HPP
#define NONDIVFEM_ANALYSIS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nondivfem/space.hpp"

namespace ndfem {

// closed-form reference solution with first and second derivatives
struct ExactSolution {
    std::function<double(Vec2)> u;
    std::function<Vec2(Vec2)> grad;
    std::function<Mat2(Vec2)> hess;
    bool available = false;
};

struct ErrorNorms {
    double u_l2 = 0.0;   // |u - u_h|_L2
    double u_h1 = 0.0;   // full H1 norm of u - u_h
    double g_l2 = 0.0;   // |grad u - g_h|_L2
    double g_h1 = 0.0;   // full H1 norm of grad u - g_h
    double y = 0.0;      // sqrt(u_h1^2 + g_h1^2)
};

// quadrature degree 0 selects 2k+4
ErrorNorms error_norms(const FeFunction& u_h, const FeFunction& g_h,
                       const ExactSolution& exact, int quad_degree = 0);

// Y-norm of a discrete pair: (|u|_H1^2 + |g|_H1^2)^(1/2)
double pair_y_norm(const FeFunction& u, const FeFunction& g, int quad_degree = 0);

// coefficient-wise difference of functions on a common space
FeFunction difference(const FeFunction& a, const FeFunction& b);

struct ConvergenceRecord {
    int level = 0;
    double h = 0.0;
    long dofs = 0;
    double err_u_l2 = 0.0;
    double err_u_h1 = 0.0;
    double err_g_l2 = 0.0;
    double err_g_h1 = 0.0;
    double err_y = 0.0;
    double eta = 0.0;
    double eoc_y = 0.0;
    int newton_iters = 0;
    bool has_exact = false;
};

// experimental order of convergence of `errors` against mesh sizes `h`;
// throws on non-monotone h
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors);
// adaptive variant: rates against dofs^(-1/2)
std::vector<double> eoc_vs_dofs(const std::vector<long>& dofs,
                                const std::vector<double>& errors);

// fills eoc_y in place; adaptive records use the dof-based rate
void fill_eoc(std::vector<ConvergenceRecord>& records, bool adaptive);

void write_records_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records);
std::vector<ConvergenceRecord> read_records_csv(std::istream& is);

// least-squares slope of -log(err) against log(dofs^(1/2)) over a dof window
double regression_rate_vs_dofs(const std::vector<ConvergenceRecord>& records,
                               const std::function<double(const ConvergenceRecord&)>& column,
                               long dof_lo, long dof_hi);

// log-log interpolation of a record column at a dof budget
double interpolate_at_dofs(const std::vector<ConvergenceRecord>& records,
                           const std::function<double(const ConvergenceRecord&)>& column,
                           long budget);

}  // namespace ndfem

#endif
