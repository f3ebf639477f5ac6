#include "nondivfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ndfem {

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    // stable sort keeps per-entry accumulation order deterministic, so equal
    // (i,j)/(j,i) addend sequences sum to bitwise-equal values
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        m.col.push_back(triplets[i].col);
        m.val.push_back(sum);
        m.row_ptr[triplets[i].row + 1] += static_cast<std::int64_t>(j - i > 0 ? 1 : 0);
        i = j;
    }
    for (int r = 0; r < n; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void CsrMatrix::multiply(const double* x, double* y) const {
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    multiply(x.data(), y.data());
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == r) d[r] = val[k];
    return d;
}

double CsrMatrix::symmetry_defect() const {
    double worst = 0.0;
    for (int r = 0; r < n; ++r) {
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const int c = col[k];
            if (c < r) continue;
            double transposed = 0.0;
            for (std::int64_t k2 = row_ptr[c]; k2 < row_ptr[c + 1]; ++k2)
                if (col[k2] == r) { transposed = val[k2]; break; }
            worst = std::max(worst, std::abs(val[k] - transposed));
        }
    }
    return worst;
}

namespace {

// Incomplete Cholesky on the lower-triangular pattern of A. Returns false if
// a pivot is non-positive (caller retries with a diagonal shift).
struct IChol {
    int n = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;  // lower triangle, diagonal last in each row
    bool build(const CsrMatrix& a, double shift);
    void apply(const double* r, double* z) const;  // z = (L L^T)^{-1} r
};

bool IChol::build(const CsrMatrix& a, double shift) {
    n = a.n;
    row_ptr.assign(n + 1, 0);
    col.clear();
    val.clear();
    for (int r = 0; r < n; ++r) {
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            if (a.col[k] <= r) {
                col.push_back(a.col[k]);
                val.push_back(a.val[k] * (a.col[k] == r ? 1.0 + shift : 1.0));
            }
        row_ptr[r + 1] = static_cast<std::int64_t>(col.size());
    }
    // incomplete factorization restricted to the lower pattern
    std::vector<double> diag(n, 0.0);
    for (int r = 0; r < n; ++r) {
        const std::int64_t lo = row_ptr[r], hi = row_ptr[r + 1];
        for (std::int64_t k = lo; k < hi; ++k) {
            const int c = col[k];
            double s = val[k];
            // subtract sum over shared columns of rows r and c
            std::int64_t pr = lo, pc = row_ptr[c];
            const std::int64_t pr_end = hi - 1, pc_end = row_ptr[c + 1] - 1;
            while (pr < pr_end && pc < pc_end) {
                if (col[pr] == col[pc]) {
                    if (col[pr] >= c) break;
                    s -= val[pr] * val[pc];
                    ++pr;
                    ++pc;
                } else if (col[pr] < col[pc]) {
                    ++pr;
                } else {
                    ++pc;
                }
            }
            if (c == r) {
                if (s <= 0.0) return false;
                diag[r] = std::sqrt(s);
                val[k] = diag[r];
            } else {
                val[k] = s / diag[c];
            }
        }
    }
    return true;
}

void IChol::apply(const double* r, double* z) const {
    // forward solve L y = r
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        const std::int64_t hi = row_ptr[i + 1] - 1;  // diagonal last
        for (std::int64_t k = row_ptr[i]; k < hi; ++k) s -= val[k] * z[col[k]];
        z[i] = s / val[hi];
    }
    // backward solve L^T z = y
    for (int i = n - 1; i >= 0; --i) {
        const std::int64_t hi = row_ptr[i + 1] - 1;
        z[i] /= val[hi];
        const double zi = z[i];
        for (std::int64_t k = row_ptr[i]; k < hi; ++k) z[col[k]] -= val[k] * zi;
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::vector<double> pcg_solve(const CsrMatrix& a, const std::vector<double>& b,
                              double rel_tol, int max_iter, Preconditioner precond,
                              SolveStats* stats) {
    if (rel_tol <= 0.0 || rel_tol >= 1.0) throw Error("pcg_solve: rel_tol must be in (0,1)");
    const int n = a.n;
    std::vector<double> x(n, 0.0), r(b), z(n), p(n), ap(n);

    std::vector<double> inv_diag;
    IChol ic;
    bool use_ic = false;
    if (precond == Preconditioner::jacobi) {
        inv_diag = a.diagonal();
        for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
    } else if (precond == Preconditioner::ichol) {
        for (double shift : {0.0, 1e-8, 1e-4, 1e-2, 1e-1}) {
            if (ic.build(a, shift)) { use_ic = true; break; }
        }
        if (!use_ic) {  // fall back to Jacobi if shifted IC never factors
            inv_diag = a.diagonal();
            for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
            precond = Preconditioner::jacobi;
        }
    }

    auto apply_precond = [&](const std::vector<double>& rin, std::vector<double>& zout) {
        if (use_ic) {
            ic.apply(rin.data(), zout.data());
        } else if (precond == Preconditioner::jacobi) {
            for (int i = 0; i < n; ++i) zout[i] = inv_diag[i] * rin[i];
        } else {
            zout = rin;
        }
    };

    const double bnorm = norm(b);
    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    st.residual_history.clear();
    if (bnorm == 0.0) {
        st.converged = true;
        st.relative_residual = 0.0;
        return x;
    }

    apply_precond(r, z);
    p = z;
    double rz = dot(r, z);
    double relres = norm(r) / bnorm;
    st.residual_history.push_back(relres);

    for (int it = 0; it < max_iter; ++it) {
        a.multiply(p.data(), ap.data());
        const double pap = dot(p, ap);
        if (pap <= 0.0) {
            st.breakdown = true;
            st.iterations = it;
            st.relative_residual = relres;
            throw SolveError("pcg_solve: non-positive curvature (matrix not SPD)");
        }
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        relres = norm(r) / bnorm;
        st.residual_history.push_back(relres);
        st.iterations = it + 1;
        if (relres <= rel_tol) {
            st.converged = true;
            st.relative_residual = relres;
            return x;
        }
        apply_precond(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    st.relative_residual = relres;
    throw SolveError("pcg_solve: no convergence in " + std::to_string(max_iter) +
                     " iterations (relative residual " + std::to_string(relres) + ")");
}

std::vector<double> dense_cholesky_solve(const CsrMatrix& a, const std::vector<double>& b) {
    const int n = a.n;
    if (n > 4000) throw Error("dense_cholesky_solve: system too large for the dense path");
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            m[static_cast<std::size_t>(r) * n + a.col[k]] = a.val[k];

    // in-place lower Cholesky
    for (int j = 0; j < n; ++j) {
        double d = m[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double l = m[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (d <= 0.0) throw SolveError("dense_cholesky_solve: non-positive pivot at row " +
                                       std::to_string(j));
        const double dj = std::sqrt(d);
        m[static_cast<std::size_t>(j) * n + j] = dj;
        for (int i = j + 1; i < n; ++i) {
            double s = m[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= m[static_cast<std::size_t>(i) * n + k] * m[static_cast<std::size_t>(j) * n + k];
            m[static_cast<std::size_t>(i) * n + j] = s / dj;
        }
    }
    std::vector<double> x(b);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) x[i] -= m[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] /= m[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) x[i] -= m[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] /= m[static_cast<std::size_t>(i) * n + i];
    }
    return x;
}

double lanczos_smallest_ritz(const CsrMatrix& a, int k, unsigned seed) {
    const int n = a.n;
    k = std::min(k, n);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;

    // deterministic start vector
    std::vector<double> v(n);
    std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
    for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v[i] = (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.5;
    }
    double vn = norm(v);
    for (double& x : v) x /= vn;

    std::vector<double> w(n);
    for (int j = 0; j < k; ++j) {
        basis.push_back(v);
        a.multiply(v.data(), w.data());
        const double aj = dot(w, v);
        alpha.push_back(aj);
        for (int i = 0; i < n; ++i) w[i] -= aj * v[i];
        if (j > 0)
            for (int i = 0; i < n; ++i) w[i] -= beta[j - 1] * basis[j - 1][i];
        for (const auto& q : basis) {  // full reorthogonalization
            const double c = dot(w, q);
            for (int i = 0; i < n; ++i) w[i] -= c * q[i];
        }
        const double bj = norm(w);
        if (bj < 1e-14) break;
        beta.push_back(bj);
        for (int i = 0; i < n; ++i) v[i] = w[i] / bj;
    }

    // smallest eigenvalue of the tridiagonal (alpha, beta) by bisection with
    // Sturm counts
    const int m = static_cast<int>(alpha.size());
    auto count_below = [&](double x) {
        int count = 0;
        double d = 1.0;
        for (int i = 0; i < m; ++i) {
            const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
            d = alpha[i] - x - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) d = 1e-300;
            if (d < 0.0) ++count;
        }
        return count;
    };
    double lo = alpha[0], hi = alpha[0];
    for (int i = 0; i < m; ++i) {
        const double off = (i > 0 ? std::abs(beta[i - 1]) : 0.0) +
                           (i + 1 < m ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - off);
        hi = std::max(hi, alpha[i] + off);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ndfem
