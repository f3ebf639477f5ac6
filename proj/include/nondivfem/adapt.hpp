#ifndef NONDIVFEM_ADAPT_HPP
#define NONDIVFEM_ADAPT_HPP

#include <functional>

#include "nondivfem/nonlinear.hpp"

namespace ndfem {

// per-cell residual indicators: eta_K^2 integrates the same three terms as
// E_theta over the cell K
struct ErrorIndicators {
    std::vector<double> eta_sq;  // per cell
    double total_sq = 0.0;
    double total() const { return std::sqrt(total_sq); }
};

ErrorIndicators compute_indicators(const ThetaOperatorContext& ctx, const LoadField& f,
                                   const FeFunction& u_h, const FeFunction& g_h,
                                   int quad_degree = 0);

// smallest cell set (greedy, descending eta_K^2) holding >= fraction of the
// total squared indicator; fraction in (0, 1]
std::vector<int> dorfler_mark(const ErrorIndicators& indicators, double fraction);

struct ExperimentConfig {
    int degree = 2;
    int geometry_order = 0;  // 0: match the degree
    double theta = 0.5;
    int initial_resolution = 2;
    int levels = 4;          // uniform-refinement levels
    long max_dofs = 100000;  // hard stop for both loops
    double mark_fraction = 0.3;
    NewtonConfig newton;
};

// called once per level with the freshly solved state
using LevelCallback = std::function<void(int level, const TriangleMesh& mesh,
                                         const NewtonResult& result,
                                         const ConvergenceRecord& record)>;

// solve -> record -> refine_uniform, `levels` times (or until max_dofs)
std::vector<ConvergenceRecord> uniform_loop(const ProblemSpec& problem,
                                            const ExperimentConfig& cfg,
                                            const LevelCallback& callback = nullptr);

// solve -> indicate -> Dorfler mark -> newest-vertex bisection, until the
// dof budget is exhausted
std::vector<ConvergenceRecord> adapt_loop(const ProblemSpec& problem,
                                          const ExperimentConfig& cfg,
                                          const LevelCallback& callback = nullptr);

}  // namespace ndfem

#endif
