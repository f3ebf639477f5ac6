#ifndef NONDIVFEM_SPARSE_HPP
#define NONDIVFEM_SPARSE_HPP

#include <cstdint>
#include <vector>

#include "nondivfem/core.hpp"

namespace ndfem {

struct Triplet {
    int row;
    int col;
    double value;
};

// Symmetric sparse matrix, full pattern stored in CSR.
struct CsrMatrix {
    int n = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets);

    void multiply(const double* x, double* y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> diagonal() const;
    std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }
    // max over stored pairs of |a_ij - a_ji|
    double symmetry_defect() const;
};

enum class Preconditioner { none, jacobi, ichol };

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    bool breakdown = false;
    std::vector<double> residual_history;
};

// Preconditioned conjugate gradients. Throws SolveError on breakdown
// (non-positive curvature: the matrix is not SPD) and on non-convergence.
std::vector<double> pcg_solve(const CsrMatrix& a, const std::vector<double>& b,
                              double rel_tol, int max_iter, Preconditioner precond,
                              SolveStats* stats = nullptr);

// Dense column-major SPD solver; throws SolveError on a non-positive pivot.
// Quadratic storage: n must stay small (test oracles, coarse fallback).
std::vector<double> dense_cholesky_solve(const CsrMatrix& a, const std::vector<double>& b);

// Smallest Ritz value from k Lanczos steps with full reorthogonalization;
// a positive value witnesses positive definiteness on the Krylov subspace.
double lanczos_smallest_ritz(const CsrMatrix& a, int k = 30, unsigned seed = 1u);

}  // namespace ndfem

#endif
