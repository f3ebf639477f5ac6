#include "nondivfem/cordes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nondivfem/quadrature.hpp"

namespace ndfem {

namespace {

struct Sample {
    double norm_a_sq;
    double trace_a;
    double norm_b_sq;
    double c;
    double eig_min;
    double sym_defect;
    Vec2 point;
    double alpha;
};

double ratio_at(const Sample& s, double lambda, bool special, bool& undefined) {
    if (special) {
        const double den = s.trace_a * s.trace_a;
        if (den <= 0.0) {
            undefined = true;
            return 1e300;
        }
        return s.norm_a_sq / den;
    }
    const double den = s.trace_a + s.c / lambda;
    if (den <= 0.0) {
        undefined = true;
        return 1e300;
    }
    const double num = s.norm_a_sq + s.norm_b_sq / (2.0 * lambda) +
                       (s.c / lambda) * (s.c / lambda);
    return num / (den * den);
}

double worst_ratio(const std::vector<Sample>& samples, double lambda, bool special,
                   bool& undefined, const Sample** worst) {
    double w = 0.0;
    undefined = false;
    for (const Sample& s : samples) {
        const double r = ratio_at(s, lambda, special, undefined);
        if (r > w) {
            w = r;
            if (worst) *worst = &s;
        }
    }
    return w;
}

}  // namespace

CordesReport check_cordes(const CoefficientSet& coeffs, const std::vector<Vec2>& points,
                          const std::vector<double>& alphas, double lambda) {
    if (points.empty()) throw Error("check_cordes: empty sample set");
    std::vector<double> avals = alphas;
    if (avals.empty()) avals.push_back(coeffs.alpha_lo);

    std::vector<Sample> samples;
    samples.reserve(points.size() * avals.size());
    double max_b = 0.0, max_c = 0.0;
    for (const Vec2& x : points) {
        for (double a : avals) {
            Sample s;
            const Mat2 matrix = coeffs.A(x, a);
            s.sym_defect = std::abs(matrix.a12 - matrix.a21);
            s.norm_a_sq = matrix.frobenius_sq();
            s.trace_a = matrix.trace();
            const Vec2 bv = coeffs.b(x, a);
            s.norm_b_sq = bv.norm_sq();
            s.c = coeffs.c(x, a);
            if (s.c < 0.0)
                throw Error("check_cordes: coefficient c negative at a sample point");
            s.eig_min = matrix.sym_eigenvalues()[0];
            s.point = x;
            s.alpha = a;
            samples.push_back(s);
            max_b = std::max(max_b, std::sqrt(s.norm_b_sq));
            max_c = std::max(max_c, s.c);
        }
    }

    CordesReport report;
    report.n_samples = points.size();
    report.n_alpha_samples = avals.size();
    report.special_condition = max_b <= 1e-14 && max_c <= 1e-14;
    report.nu_min = 1e300;
    report.symmetry_defect = 0.0;
    for (const Sample& s : samples) {
        report.nu_min = std::min(report.nu_min, s.eig_min);
        report.symmetry_defect = std::max(report.symmetry_defect, s.sym_defect);
    }
    if (report.symmetry_defect > 1e-12)
        throw Error("check_cordes: coefficient matrix not symmetric");

    const double dim = 2.0;
    const double offset = report.special_condition ? dim - 1.0 : dim;

    auto eps_for = [&](double lam, bool& undef, const Sample** worst) {
        const double w = worst_ratio(samples, lam, report.special_condition, undef, worst);
        return std::make_pair(w, 1.0 / w - offset);
    };

    double lam = lambda;
    if (report.special_condition) {
        lam = 1.0;  // lambda plays no role in the special condition
    } else if (lambda <= 0.0) {
        // golden-section maximization of eps over log lambda in [1e-3, 1e3]
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = std::log(1e-3), hi = std::log(1e3);
        double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
        bool u;
        double f1 = eps_for(std::exp(m1), u, nullptr).second;
        double f2 = eps_for(std::exp(m2), u, nullptr).second;
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + gr * (hi - lo);
                f2 = eps_for(std::exp(m2), u, nullptr).second;
            } else {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - gr * (hi - lo);
                f1 = eps_for(std::exp(m1), u, nullptr).second;
            }
        }
        lam = std::exp(0.5 * (lo + hi));
    }

    const Sample* worst = &samples.front();
    bool undefined = false;
    const auto [w, eps] = eps_for(lam, undefined, &worst);
    report.lambda = lam;
    report.worst_ratio = w;
    report.eps_max = eps;
    report.worst_point = worst->point;
    report.worst_alpha = worst->alpha;
    report.undefined_denominator = undefined;
    report.pass = !undefined && eps >= kCordesMinEps && report.nu_min > 0.0;
    return report;
}

std::vector<Vec2> cordes_sample_points(const TriangleMesh& mesh, int quad_degree, int grid) {
    std::vector<Vec2> pts;
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const CellMap map = mesh.cell_map(c);
        for (std::size_t q = 0; q < rule.size(); ++q)
            pts.push_back(map.point(rule.ref_point(q)));
    }

    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const Vec2& v : mesh.vertices) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const Vec2 p{lo.x + (hi.x - lo.x) * (i + 0.5) / grid,
                         lo.y + (hi.y - lo.y) * (j + 0.5) / grid};
            if (mesh.domain == DomainKind::disk) {
                if ((p - mesh.disk_center).norm() < mesh.disk_radius) pts.push_back(p);
            } else {
                pts.push_back(p);
            }
        }
    }
    return pts;
}

std::vector<double> alpha_samples(const CoefficientSet& coeffs, int n) {
    std::vector<double> a;
    if (!coeffs.alpha_dependent) {
        a.push_back(coeffs.alpha_lo);
        return a;
    }
    if (n < 2) throw Error("alpha_samples: need at least 2 samples");
    for (int i = 0; i < n; ++i)
        a.push_back(coeffs.alpha_lo + (coeffs.alpha_hi - coeffs.alpha_lo) * i / (n - 1.0));
    return a;
}

std::string CordesReport::to_text() const {
    std::ostringstream os;
    os.precision(6);
    os << "Cordes condition report\n";
    os << "  condition:        " << (special_condition ? "special (b=0, c=0)" : "general")
       << "\n";
    os << "  lambda=" << lambda << "\n";
    os << "  samples:          " << n_samples << " points x " << n_alpha_samples
       << " controls\n";
    os << "  worst ratio:      " << worst_ratio << " (bound 1/("
       << (special_condition ? 1 : 2) << "+eps))\n";
    os << "  eps_max:          " << eps_max << "\n";
    os << "  worst point:      (" << worst_point.x << ", " << worst_point.y << ")";
    if (n_alpha_samples > 1) os << " alpha=" << worst_alpha;
    os << "\n";
    os << "  ellipticity nu:   " << nu_min << "\n";
    if (undefined_denominator) os << "  HARD FAILURE: tr A + c/lambda <= 0 at a sample\n";
    os << "  result:           " << (pass ? "PASS" : "FAIL") << " (requires eps>="
       << kCordesMinEps << ")\n";
    if (pass) os << "  admissible:       lambda=" << lambda << " eps>=" << eps_max << "\n";
    return os.str();
}

std::string CordesReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "condition,lambda,worst_ratio,eps_max,worst_x1,worst_x2,worst_alpha,nu_min,"
          "undefined,pass,n_points,n_alphas\n";
    os << (special_condition ? "special" : "general") << "," << lambda << "," << worst_ratio
       << "," << eps_max << "," << worst_point.x << "," << worst_point.y << ","
       << worst_alpha << "," << nu_min << "," << (undefined_denominator ? 1 : 0) << ","
       << (pass ? 1 : 0) << "," << n_samples << "," << n_alpha_samples << "\n";
    return os.str();
}

}  // namespace ndfem
