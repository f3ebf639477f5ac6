#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "nondivfem/adapt.hpp"
#include "nondivfem/cordes.hpp"
#include "nondivfem/io.hpp"

namespace fs = std::filesystem;
using namespace ndfem;

namespace {

struct CommonOptions {
    std::string problem;
    std::string out_dir = "out";
    int degree = 2;
    int geometry_order = 0;  // 0: match degree
    double theta = 0.5;
    int levels = 4;
    int resolution = 2;
    bool adapt = false;
    double mark_fraction = 0.3;
    long max_dofs = 100000;
    int alpha_samples = 64;
    double R = std::sqrt(2.0);
    double tol = 1e-8;
    int max_iter = 8;
    double rel_tol = 1e-10;
    bool strict_cordes = false;
    std::string dump_matrix;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--problem", opt.problem, "builtin name or problem file");
    cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--degree", opt.degree, "polynomial degree")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    cmd->add_option("--geometry-order", opt.geometry_order,
                    "boundary geometry order (0 = match degree)")
        ->check(CLI::IsMember({0, 1, 2}));
    cmd->add_option("--theta", opt.theta, "blending parameter of M_theta")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--levels", opt.levels, "uniform refinement levels")->capture_default_str();
    cmd->add_option("--resolution", opt.resolution, "initial mesh resolution")
        ->capture_default_str();
    cmd->add_flag("--adapt", opt.adapt, "adaptive refinement instead of uniform");
    cmd->add_option("--mark-fraction", opt.mark_fraction, "Dorfler marking fraction")
        ->capture_default_str();
    cmd->add_option("--max-dofs", opt.max_dofs, "dof budget")->capture_default_str();
    cmd->add_option("--alpha-samples", opt.alpha_samples, "control grid size")
        ->capture_default_str();
    cmd->add_option("--tol", opt.tol, "Newton increment tolerance")->capture_default_str();
    cmd->add_option("--max-iter", opt.max_iter, "Newton iteration cap")->capture_default_str();
    cmd->add_option("--rel-tol", opt.rel_tol, "linear solver relative tolerance")
        ->capture_default_str();
    cmd->add_flag("--strict-cordes", opt.strict_cordes,
                  "reject any problem that fails the Cordes check");
}

ProblemSpec resolve_problem(const CommonOptions& opt, const std::string& fallback) {
    std::string name = opt.problem.empty() ? fallback : opt.problem;
    for (const char* builtin_name :
         {"poisson-disk", "linear-cordes", "ma-R", "hjb-aniso", "cordes-violating"}) {
        if (name == builtin_name) return builtin(name, opt.R);
    }
    return load_problem_file(name);
}

ExperimentConfig experiment_config(const CommonOptions& opt) {
    ExperimentConfig cfg;
    cfg.degree = opt.degree;
    cfg.geometry_order = opt.geometry_order;
    cfg.theta = opt.theta;
    cfg.initial_resolution = opt.resolution;
    cfg.levels = opt.levels;
    cfg.max_dofs = opt.max_dofs;
    cfg.mark_fraction = opt.mark_fraction;
    cfg.newton.tol = opt.tol;
    cfg.newton.max_iter = opt.max_iter;
    cfg.newton.n_alpha = opt.alpha_samples;
    cfg.newton.linear_rel_tol = opt.rel_tol;
    cfg.newton.strict_cordes = opt.strict_cordes;
    return cfg;
}

CordesReport run_cordes_check(const ProblemSpec& problem, const CommonOptions& opt,
                              int grid = 64) {
    const TriangleMesh mesh = make_mesh(problem, opt.resolution,
                                        opt.geometry_order > 0 ? opt.geometry_order : 1);
    const std::vector<Vec2> points = cordes_sample_points(mesh, 4, grid);
    const std::vector<double> alphas = alpha_samples(problem.coeffs, opt.alpha_samples);
    return check_cordes(problem.coeffs, points, alphas, problem.coeffs.lambda);
}

// returns true when solving may proceed
bool gate_on_cordes(const ProblemSpec& problem, const CommonOptions& opt) {
    if (problem.kind == ProblemSpec::Kind::monge_ampere) return true;
    const CordesReport report = run_cordes_check(problem, opt);
    if (report.pass) return true;
    if (opt.strict_cordes || problem.coeffs.eps_declared <= 0.0) {
        std::cerr << "error: problem '" << problem.name
                  << "' rejected: Cordes condition check failed (eps_max = "
                  << report.eps_max << " at lambda = " << report.lambda << ")\n";
        return false;
    }
    std::cerr << "warning: Cordes check failed for '" << problem.name
              << "' (measured eps_max = " << report.eps_max << " at lambda = "
              << report.lambda << ", declared eps = " << problem.coeffs.eps_declared
              << "); proceeding with the declared constants\n";
    return true;
}

void print_records(const std::vector<ConvergenceRecord>& records) {
    std::cout << std::left << std::setw(6) << "level" << std::setw(12) << "h" << std::setw(9)
              << "dofs" << std::setw(13) << "err_Y" << std::setw(13) << "eta" << std::setw(9)
              << "eoc_Y" << std::setw(8) << "newton" << '\n';
    for (const auto& r : records) {
        std::cout << std::left << std::setw(6) << r.level << std::setw(12)
                  << std::setprecision(4) << r.h << std::setw(9) << r.dofs << std::setw(13)
                  << std::setprecision(5) << (r.has_exact ? r.err_y : std::nan(""))
                  << std::setw(13) << r.eta << std::setw(9) << std::setprecision(3) << r.eoc_y
                  << std::setw(8) << r.newton_iters << '\n';
    }
}

int run_solve(const CommonOptions& opt, const std::string& default_problem) {
    ProblemSpec problem = resolve_problem(opt, default_problem);
    if (!gate_on_cordes(problem, opt)) return 1;

    fs::create_directories(opt.out_dir);
    std::ofstream trace_file(fs::path(opt.out_dir) / "trace.csv");
    write_trace_header(trace_file);

    bool all_converged = true;
    const ExperimentConfig cfg = experiment_config(opt);
    const LevelCallback callback = [&](int level, const TriangleMesh& mesh,
                                       const NewtonResult& result, const ConvergenceRecord&) {
        std::ofstream mesh_file(fs::path(opt.out_dir) /
                                ("mesh_" + std::to_string(level) + ".txt"));
        write_mesh_text(mesh_file, mesh);
        write_trace_csv(trace_file, level, result.trace);
        if (!result.trace.converged) all_converged = false;
        if (!opt.dump_matrix.empty() && level == 0) {
            SparseSymSystem sys =
                assemble_system(result.spaces->u_space, result.spaces->g_space,
                                result.final_ctx, result.final_load, result.quad_degree);
            std::ofstream mm(opt.dump_matrix);
            write_matrix_market(mm, sys.matrix);
        }
    };

    const std::vector<ConvergenceRecord> records =
        opt.adapt ? adapt_loop(problem, cfg, callback) : uniform_loop(problem, cfg, callback);

    std::ofstream records_file(fs::path(opt.out_dir) / "records.csv");
    write_records_csv(records_file, records);
    print_records(records);

    if (!all_converged) {
        std::cerr << "error: iteration did not converge on at least one level\n";
        return 2;
    }
    return 0;
}

int run_eoc(const std::string& path, bool vs_dofs) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<ConvergenceRecord> records = read_records_csv(in);
    if (records.size() < 2) throw Error("need at least two records");

    std::vector<double> hs;
    std::vector<long> dofs_l;
    for (const auto& r : records) {
        hs.push_back(r.h);
        dofs_l.push_back(r.dofs);
    }
    auto column_rates = [&](auto getter) {
        std::vector<double> errs;
        for (const auto& r : records) errs.push_back(getter(r));
        return vs_dofs ? eoc_vs_dofs(dofs_l, errs) : eoc(hs, errs);
    };
    const auto r_u_l2 = column_rates([](const ConvergenceRecord& r) { return r.err_u_l2; });
    const auto r_u_h1 = column_rates([](const ConvergenceRecord& r) { return r.err_u_h1; });
    const auto r_g_l2 = column_rates([](const ConvergenceRecord& r) { return r.err_g_l2; });
    const auto r_g_h1 = column_rates([](const ConvergenceRecord& r) { return r.err_g_h1; });
    const auto r_y = column_rates([](const ConvergenceRecord& r) { return r.err_y; });
    const auto r_eta = column_rates([](const ConvergenceRecord& r) { return r.eta; });

    std::cout << std::left << std::setw(7) << "level" << std::setw(10) << "u_L2"
              << std::setw(10) << "u_H1" << std::setw(10) << "g_L2" << std::setw(10) << "g_H1"
              << std::setw(10) << "Y" << std::setw(10) << "eta" << '\n';
    for (std::size_t i = 0; i < r_y.size(); ++i) {
        std::cout << std::left << std::setw(7) << records[i + 1].level << std::setprecision(3)
                  << std::setw(10) << r_u_l2[i] << std::setw(10) << r_u_h1[i] << std::setw(10)
                  << r_g_l2[i] << std::setw(10) << r_g_h1[i] << std::setw(10) << r_y[i]
                  << std::setw(10) << r_eta[i] << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"least-squares gradient-recovery FEM for nondivergence-form elliptic PDEs"};
    app.require_subcommand(1);

    CommonOptions opt;
    CLI::App* solve_linear = app.add_subcommand("solve-linear", "solve a linear problem");
    add_common_flags(solve_linear, opt);
    solve_linear->add_option("--dump-matrix", opt.dump_matrix,
                             "write the level-0 system in MatrixMarket format");
    CLI::App* solve_ma = app.add_subcommand("solve-ma", "solve the Monge-Ampere problem");
    add_common_flags(solve_ma, opt);
    solve_ma->add_option("--R", opt.R, "ma-R parameter")->capture_default_str();
    CLI::App* solve_hjb = app.add_subcommand("solve-hjb", "solve an HJB problem");
    add_common_flags(solve_hjb, opt);

    CLI::App* cordes_cmd = app.add_subcommand("cordes-check", "verify the Cordes condition");
    add_common_flags(cordes_cmd, opt);
    int grid = 64;
    double lambda_override = 0.0;
    cordes_cmd->add_option("--grid", grid, "tensor sampling grid")->capture_default_str();
    cordes_cmd->add_option("--lambda", lambda_override,
                           "fixed lambda (0 keeps the problem value)");

    CLI::App* eoc_cmd = app.add_subcommand("eoc", "EOC table from a records.csv");
    std::string eoc_in;
    bool eoc_vs_dofs_flag = false;
    eoc_cmd->add_option("--in", eoc_in, "records.csv path")->required();
    eoc_cmd->add_flag("--vs-dofs", eoc_vs_dofs_flag, "rates against dofs^(1/2)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_linear->parsed()) return run_solve(opt, "linear-cordes");
        if (solve_ma->parsed()) {
            if (opt.problem.empty()) opt.problem = "ma-R";
            return run_solve(opt, "ma-R");
        }
        if (solve_hjb->parsed()) return run_solve(opt, "hjb-aniso");

        if (cordes_cmd->parsed()) {
            ProblemSpec problem = resolve_problem(opt, "hjb-aniso");
            if (problem.kind == ProblemSpec::Kind::monge_ampere) {
                std::cerr << "error: the MA problem has no fixed coefficients to check\n";
                return 1;
            }
            if (lambda_override > 0.0) problem.coeffs.lambda = lambda_override;
            const CordesReport report = run_cordes_check(problem, opt, grid);
            std::cout << report.to_text();
            fs::create_directories(opt.out_dir);
            std::ofstream csv(fs::path(opt.out_dir) / "cordes.csv");
            csv << report.to_csv();
            return report.pass ? 0 : 1;
        }

        if (eoc_cmd->parsed()) return run_eoc(eoc_in, eoc_vs_dofs_flag);
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
