#ifndef NONDIVFEM_CORE_HPP
#define NONDIVFEM_CORE_HPP

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ndfem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
    // z-component of the 2D cross product
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Dense 2x2 matrix, row-major. Used for coefficient tensors, Jacobians and
// discrete Hessians; all operations are closed-form.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
    // column-wise constructor: [c1 | c2]
    static Mat2 from_columns(const Vec2& c1, const Vec2& c2) {
        return {c1.x, c2.x, c1.y, c2.y};
    }
    static Mat2 outer(const Vec2& u, const Vec2& v) {
        return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
    }
    static Mat2 rotation(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c, -s, s, c};
    }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 sym() const {
        const double off = 0.5 * (a12 + a21);
        return {a11, off, off, a22};
    }
    // cofactor matrix; for 2x2, det'(M)[H] = cof(M) : H
    Mat2 cofactor() const { return {a22, -a21, -a12, a11}; }
    Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    double frobenius_sq() const {
        return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    }
    // Frobenius inner product A : B = tr(A^T B)
    double ddot(const Mat2& o) const {
        return a11 * o.a11 + a12 * o.a12 + a21 * o.a21 + a22 * o.a22;
    }
    // row c as a vector (c in {0,1})
    Vec2 row(int c) const { return c == 0 ? Vec2{a11, a12} : Vec2{a21, a22}; }

    // eigenvalues of the symmetric part, ascending
    std::array<double, 2> sym_eigenvalues() const {
        const Mat2 s = sym();
        const double mean = 0.5 * s.trace();
        const double off = s.a12;
        const double r = std::sqrt(0.25 * (s.a11 - s.a22) * (s.a11 - s.a22) + off * off);
        return {mean - r, mean + r};
    }
};

// Compensated (Kahan) accumulator. Used wherever two independent summation
// paths must agree to ~1e-12 regardless of cell count.
class KahanSum {
  public:
    void add(double v) {
        const double y = v - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SolveError : public Error {
  public:
    explicit SolveError(const std::string& msg) : Error(msg) {}
};

// Thread budget: NONDIV_FEM_THREADS caps parallelism, default is the
// hardware concurrency clamped to 8.
inline int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (n > 8) n = 8;
    if (const char* env = std::getenv("NONDIV_FEM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
        if (cap >= 1 && cap > n) n = cap;
    }
    return n;
}

// Parallel loop over [0, n). The body must only write to per-index slots;
// reductions are performed by the caller in index order, which keeps all
// results deterministic regardless of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int nt = thread_budget();
    if (nt <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace ndfem

#endif
