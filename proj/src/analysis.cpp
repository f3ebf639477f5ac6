#include "nondivfem/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "nondivfem/quadrature.hpp"

namespace ndfem {

namespace {

struct NormAccumulator {
    KahanSum u_l2, u_h1s, g_l2, g_h1s;
};

}  // namespace

ErrorNorms error_norms(const FeFunction& u_h, const FeFunction& g_h,
                       const ExactSolution& exact, int quad_degree) {
    const FeSpace& su = *u_h.space;
    const FeSpace& sg = *g_h.space;
    if (su.mesh != sg.mesh) throw Error("error_norms: meshes differ");
    const TriangleMesh& mesh = *su.mesh;
    const int k = std::max(su.degree, sg.degree);
    if (quad_degree <= 0) quad_degree = 2 * k + 4;
    const QuadratureRule rule = triangle_quadrature(quad_degree);

    std::vector<Vec2> ref_pts(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) ref_pts[q] = rule.ref_point(q);

    std::vector<NormAccumulator> per_cell(mesh.n_cells());
    parallel_for(mesh.n_cells(), [&](std::size_t ci) {
        const int cell = static_cast<int>(ci);
        const CellMap map = mesh.cell_map(cell);
        const ScalarEval ue = evaluate_scalar(u_h, cell, ref_pts);
        const VectorEval ge = evaluate_vector(g_h, cell, ref_pts);
        NormAccumulator& acc = per_cell[ci];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 ref = ref_pts[q];
            const double wq = rule.weights[q] * std::abs(map.jacobian(ref).det());
            const Vec2 x = map.point(ref);
            const double du = exact.u(x) - ue.values[q];
            const Vec2 dgrad = exact.grad(x) - ue.gradients[q];
            const Vec2 dg = exact.grad(x) - ge.values[q];
            const Mat2 dhess = exact.hess(x) - ge.jacobians[q];
            acc.u_l2.add(wq * du * du);
            acc.u_h1s.add(wq * dgrad.norm_sq());
            acc.g_l2.add(wq * dg.norm_sq());
            acc.g_h1s.add(wq * dhess.frobenius_sq());
        }
    });

    KahanSum u_l2, u_h1s, g_l2, g_h1s;
    for (const auto& acc : per_cell) {
        u_l2.add(acc.u_l2.value());
        u_h1s.add(acc.u_h1s.value());
        g_l2.add(acc.g_l2.value());
        g_h1s.add(acc.g_h1s.value());
    }

    ErrorNorms norms;
    norms.u_l2 = std::sqrt(u_l2.value());
    norms.u_h1 = std::sqrt(u_l2.value() + u_h1s.value());
    norms.g_l2 = std::sqrt(g_l2.value());
    norms.g_h1 = std::sqrt(g_l2.value() + g_h1s.value());
    norms.y = std::sqrt(norms.u_h1 * norms.u_h1 + norms.g_h1 * norms.g_h1);
    return norms;
}

double pair_y_norm(const FeFunction& u, const FeFunction& g, int quad_degree) {
    ExactSolution zero;
    zero.u = [](Vec2) { return 0.0; };
    zero.grad = [](Vec2) { return Vec2{0.0, 0.0}; };
    zero.hess = [](Vec2) { return Mat2{}; };
    const ErrorNorms n = error_norms(u, g, zero, quad_degree);
    return n.y;
}

FeFunction difference(const FeFunction& a, const FeFunction& b) {
    if (a.space != b.space) throw Error("difference: functions on different spaces");
    FeFunction d(*a.space);
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) d.coeffs[i] = a.coeffs[i] - b.coeffs[i];
    return d;
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors) {
    if (h.size() != errors.size()) throw Error("eoc: size mismatch");
    if (h.size() < 2) throw Error("eoc: need at least two records");
    std::vector<double> rates;
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (!(h[i] < h[i - 1])) throw Error("eoc: mesh sizes not monotonically decreasing");
        if (errors[i] <= 0.0 || errors[i - 1] <= 0.0) {
            rates.push_back(0.0);
            continue;
        }
        rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]));
    }
    return rates;
}

std::vector<double> eoc_vs_dofs(const std::vector<long>& dofs,
                                const std::vector<double>& errors) {
    if (dofs.size() != errors.size()) throw Error("eoc_vs_dofs: size mismatch");
    if (dofs.size() < 2) throw Error("eoc_vs_dofs: need at least two records");
    std::vector<double> rates;
    for (std::size_t i = 1; i < dofs.size(); ++i) {
        if (dofs[i] <= dofs[i - 1]) throw Error("eoc_vs_dofs: dofs not increasing");
        if (errors[i] <= 0.0 || errors[i - 1] <= 0.0) {
            rates.push_back(0.0);
            continue;
        }
        rates.push_back(std::log(errors[i - 1] / errors[i]) /
                        (0.5 * std::log(static_cast<double>(dofs[i]) / dofs[i - 1])));
    }
    return rates;
}

void fill_eoc(std::vector<ConvergenceRecord>& records, bool adaptive) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double e0 = records[i - 1].err_y, e1 = records[i].err_y;
        if (e0 <= 0.0 || e1 <= 0.0) continue;
        if (adaptive) {
            records[i].eoc_y = std::log(e0 / e1) /
                               (0.5 * std::log(static_cast<double>(records[i].dofs) /
                                               records[i - 1].dofs));
        } else {
            records[i].eoc_y = std::log(e0 / e1) / std::log(records[i - 1].h / records[i].h);
        }
    }
}

void write_records_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
    os << "level,h,dofs,err_u_l2,err_u_h1,err_g_l2,err_g_h1,err_Y,eta,eoc_Y,newton_iters\n";
    os << std::setprecision(12);
    for (const auto& r : records) {
        os << r.level << ',' << r.h << ',' << r.dofs << ',';
        if (r.has_exact) {
            os << r.err_u_l2 << ',' << r.err_u_h1 << ',' << r.err_g_l2 << ',' << r.err_g_h1
               << ',' << r.err_y << ',';
        } else {
            os << "nan,nan,nan,nan,nan,";
        }
        os << r.eta << ',' << r.eoc_y << ',' << r.newton_iters << '\n';
    }
}

std::vector<ConvergenceRecord> read_records_csv(std::istream& is) {
    std::vector<ConvergenceRecord> records;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> fields;
        while (std::getline(ls, tok, ',')) fields.push_back(tok);
        if (fields.size() != 11) throw Error("read_records_csv: malformed line: " + line);
        ConvergenceRecord r;
        r.level = std::stoi(fields[0]);
        r.h = std::stod(fields[1]);
        r.dofs = std::stol(fields[2]);
        r.err_u_l2 = std::stod(fields[3]);
        r.err_u_h1 = std::stod(fields[4]);
        r.err_g_l2 = std::stod(fields[5]);
        r.err_g_h1 = std::stod(fields[6]);
        r.err_y = std::stod(fields[7]);
        r.eta = std::stod(fields[8]);
        r.eoc_y = std::stod(fields[9]);
        r.newton_iters = std::stoi(fields[10]);
        r.has_exact = std::isfinite(r.err_y);
        records.push_back(r);
    }
    return records;
}

double regression_rate_vs_dofs(const std::vector<ConvergenceRecord>& records,
                               const std::function<double(const ConvergenceRecord&)>& column,
                               long dof_lo, long dof_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& r : records) {
        if (r.dofs < dof_lo || r.dofs > dof_hi) continue;
        const double e = column(r);
        if (!(e > 0.0)) continue;
        const double x = 0.5 * std::log(static_cast<double>(r.dofs));
        const double y = -std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw Error("regression_rate_vs_dofs: not enough records in the window");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double interpolate_at_dofs(const std::vector<ConvergenceRecord>& records,
                           const std::function<double(const ConvergenceRecord&)>& column,
                           long budget) {
    const ConvergenceRecord* lo = nullptr;
    const ConvergenceRecord* hi = nullptr;
    for (const auto& r : records) {
        if (!(column(r) > 0.0)) continue;
        if (r.dofs <= budget && (!lo || r.dofs > lo->dofs)) lo = &r;
        if (r.dofs >= budget && (!hi || r.dofs < hi->dofs)) hi = &r;
    }
    if (!lo && !hi) throw Error("interpolate_at_dofs: no usable records");
    if (!lo) return column(*hi);
    if (!hi || lo == hi) return column(*lo);
    const double t = (std::log(static_cast<double>(budget)) - std::log(static_cast<double>(lo->dofs))) /
                     (std::log(static_cast<double>(hi->dofs)) - std::log(static_cast<double>(lo->dofs)));
    return std::exp((1.0 - t) * std::log(column(*lo)) + t * std::log(column(*hi)));
}

}  // namespace ndfem
