#include "nondivfem/quadrature.hpp"

#include <cmath>

namespace ndfem {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw Error("gauss_legendre_01: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration on P_n over [-1,1], then map to [0,1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
}

QuadratureRule triangle_quadrature(int degree) {
    if (degree < 1 || degree > 10)
        throw Error("triangle_quadrature: unsupported degree " + std::to_string(degree));

    // (u,v) in [0,1]^2 -> (x,y) = (u, v(1-u)), Jacobian (1-u). A polynomial of
    // total degree p becomes degree <= p+1 in u and <= p in v, so n Gauss
    // points with 2n-1 >= p+1 are exact.
    const int n = (degree + 3) / 2;
    std::vector<double> gn, gw;
    gauss_legendre_01(n, gn, gw);

    QuadratureRule rule;
    rule.degree = degree;
    rule.points.reserve(static_cast<std::size_t>(n) * n);
    rule.weights.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = gn[i], v = gn[j];
            const double x = u;
            const double y = v * (1.0 - u);
            rule.points.push_back({1.0 - x - y, x, y});
            rule.weights.push_back(gw[i] * gw[j] * (1.0 - u));
        }
    }
    return rule;
}

}  // namespace ndfem
