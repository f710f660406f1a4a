/**
 * treelaw: command-line front end for the tree-diffusion library.
 *
 * Subcommands:
 *   solve        run the fixed-point solver, export F and (optionally) the edge law
 *   sample-tree  draw exact samples of the field on a depth-k ball
 *   simulate     Euler-Maruyama dynamics, local pair or truncated tree
 *   verify       run the named self-checks against closed forms
 *   analytics    spectral density and moment-polynomial reports
 *
 * Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
 * (non-convergence, mass escaping the grid). Every run writes a
 * run_manifest.json next to its outputs recording command, seed and files.
 */

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "treelaw/analytics.hpp"
#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/grid.hpp"
#include "treelaw/io.hpp"
#include "treelaw/local_sim.hpp"
#include "treelaw/numerics.hpp"
#include "treelaw/potentials.hpp"
#include "treelaw/stats.hpp"
#include "treelaw/tree.hpp"
#include "treelaw/verify.hpp"

namespace {

using nlohmann::json;
using namespace treelaw;

/// Convergence and confinement problems: reported on stderr, exit code 2.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int default_threads() {
    if (const char* env = std::getenv("TREELAW_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::string join_args(int argc, char** argv) {
    std::ostringstream out;
    for (int i = 0; i < argc; ++i) {
        if (i) out << ' ';
        out << argv[i];
    }
    return out.str();
}

/// Model selection shared by solve / sample-tree / simulate: either a config
/// file or one of the built-in families by name.
struct ModelFlags {
    std::string config_path;
    std::string model;
    int m = 3;
    double z = 4.0;
    double q = 1.0;
    std::string confinement = "gaussian";
    double grid_lo = -10.0;
    double grid_hi = 10.0;
    int grid_n = 2049;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--config", f.config_path, "model config JSON file (overrides --model)");
    cmd->add_option("--model", f.model, "built-in family: linear | noninteracting | dyson");
    cmd->add_option("--m", f.m, "branching number (vertices have m neighbours)");
    cmd->add_option("--z", f.z, "confinement strength of the linear family");
    cmd->add_option("--q", f.q, "confinement coefficient of the noninteracting family");
    cmd->add_option("--U", f.confinement, "dyson confinement: gaussian | quartic");
    cmd->add_option("--grid-lo", f.grid_lo, "left grid endpoint");
    cmd->add_option("--grid-hi", f.grid_hi, "right grid endpoint");
    cmd->add_option("--grid-n", f.grid_n, "grid nodes (odd keeps 0 on the grid)");
}

ModelConfig build_model(const ModelFlags& f) {
    if (!f.config_path.empty()) return load_model_config(f.config_path);
    if (f.model.empty())
        throw std::invalid_argument("no model given: pass --config FILE or --model NAME");
    const Grid grid{f.grid_lo, f.grid_hi, f.grid_n};
    if (f.model == "linear") return make_linear_model(f.m, f.z, grid);
    if (f.model == "noninteracting") return make_noninteracting_model(f.m, f.q, grid);
    if (f.model == "dyson") {
        if (f.confinement == "gaussian")
            return make_dyson_model(
                f.m, [](double x) { return 0.5 * x * x; }, [](double x) { return x; }, grid);
        if (f.confinement == "quartic")
            return make_dyson_model(
                f.m, [](double x) { return 0.25 * x * x * x * x; },
                [](double x) { return x * x * x; }, grid);
        throw std::invalid_argument("unknown dyson confinement \"" + f.confinement +
                                    "\" (expected gaussian or quartic)");
    }
    throw std::invalid_argument("unknown model \"" + f.model +
                                "\" (expected linear, noninteracting or dyson)");
}

struct SolverFlags {
    std::string method = "picard";
    double damping = 0.5;
    double tol = 1e-8;
    int max_iter = 500;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--method", f.method, "picard | power (power needs m = 2)")
        ->check(CLI::IsMember({"picard", "power"}));
    cmd->add_option("--damping", f.damping, "picard damping factor in (0, 1]");
    cmd->add_option("--tol", f.tol, "sup-norm tolerance on the update");
    cmd->add_option("--max-iter", f.max_iter, "iteration cap");
}

FixedPointSolution solve_model(const ModelConfig& cfg, const SolverFlags& f) {
    if (f.method == "power") {
        PowerOptions opts;
        opts.tol = f.tol;
        opts.max_iter = f.max_iter;
        return solve_power_m2(cfg, opts);
    }
    PicardOptions opts;
    opts.damping = f.damping;
    opts.tol = f.tol;
    opts.max_iter = f.max_iter;
    return solve_picard(cfg, opts);
}

/// Commands that consume the solution (sampling, simulation) refuse to run on
/// a bad one; `solve` itself writes its artifacts first and then reports.
void require_confined(const FixedPointSolution& sol) {
    if (!sol.converged) throw NumericalFailure("not converged");
    if (sol.boundary_mass_ratio > 1e-10)
        throw NumericalFailure("no confined solution on grid (boundary mass ratio " +
                               format_double(sol.boundary_mass_ratio) + ")");
}

double sample_covariance(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    const double ma = mean(a);
    const double mb = mean(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (a[i] - ma) * (b[i] - mb);
    return acc / static_cast<double>(n - 1);
}

std::vector<std::pair<double, double>> zip_pairs(const std::vector<double>& a,
                                                 const std::vector<double>& b) {
    std::vector<std::pair<double, double>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = {a[i], b[i]};
    return out;
}

json grid_json(const Grid& g) { return json{{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}}; }

// ---------------------------------------------------------------- solve ----

int run_solve(const ModelFlags& mf, const SolverFlags& sf, const std::string& out_dir,
              bool emit_law, const std::string& command) {
    const ModelConfig cfg = build_model(mf);
    const FixedPointSolution sol = solve_model(cfg, sf);
    ensure_directory(out_dir);

    const GridFunction dF = derivative_centered(sol.F);
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(cfg.grid.n));
    for (int i = 0; i < cfg.grid.n; ++i)
        rows.push_back({cfg.grid.x(i), sol.F[i], dF[i], std::exp(-sol.F[i])});
    const std::string f_csv = out_dir + "/F.csv";
    write_csv(f_csv, {"x", "F", "dF", "exp_neg_F"}, rows);

    json side;
    side["C"] = sol.C;
    side["residual"] = sol.residual;
    side["iterations"] = sol.iterations;
    side["integrability"] = sol.integrability;
    side["converged"] = sol.converged;
    side["boundary_mass_ratio"] = sol.boundary_mass_ratio;
    side["method"] = sf.method;
    side["damping"] = sf.damping;
    side["tol"] = sf.tol;
    side["grid"] = grid_json(cfg.grid);
    const BandCheck band = band_check(cfg, sol);
    if (band.applicable) {
        side["curvature_band"] = {{"in_band", band.in_band},
                                  {"f2_min", band.f2_min},
                                  {"f2_max", band.f2_max},
                                  {"band_lo", band.band_lo},
                                  {"band_hi", band.band_hi}};
    }
    const std::string side_path = out_dir + "/solve.json";
    {
        std::ofstream outf(side_path);
        if (!outf) throw std::runtime_error("cannot write " + side_path);
        outf << side.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = command;
    manifest.config_path = mf.config_path;
    manifest.outputs = {f_csv, side_path};
    manifest.timestamp = manifest_timestamp();

    const bool usable = sol.converged && sol.boundary_mass_ratio <= 1e-10;
    if (emit_law && usable) {
        const EdgeLaw law = build_edge_law(cfg, sol);
        const std::string rho_csv = out_dir + "/rho.csv";
        write_matrix_csv(rho_csv, cfg.grid, law.rho);
        std::vector<std::vector<double>> lcol, mcol;
        for (int i = 0; i < cfg.grid.n; ++i) {
            lcol.push_back({cfg.grid.x(i), law.l[i]});
            mcol.push_back({cfg.grid.x(i), law.rho_X[i]});
        }
        const std::string l_csv = out_dir + "/l.csv";
        const std::string marg_csv = out_dir + "/rho_X.csv";
        write_csv(l_csv, {"x", "l"}, lcol);
        write_csv(marg_csv, {"x", "rho_X"}, mcol);
        manifest.outputs.push_back(rho_csv);
        manifest.outputs.push_back(l_csv);
        manifest.outputs.push_back(marg_csv);
    }
    write_manifest(out_dir, manifest);

    if (!sol.converged) {
        std::cerr << "error: not converged after " << sol.iterations
                  << " iterations (residual " << format_double(sol.residual) << ")\n";
        return 2;
    }
    if (sol.boundary_mass_ratio > 1e-10) {
        std::cerr << "error: no confined solution on grid (boundary mass ratio "
                  << format_double(sol.boundary_mass_ratio) << ")\n";
        return 2;
    }
    std::cout << "converged in " << sol.iterations << " iterations, residual "
              << format_double(sol.residual) << "\n"
              << "C = " << format_double(sol.C)
              << ", F(1) = " << format_double(sol.F.eval_extrapolate(1.0)) << "\n"
              << "wrote " << f_csv << "\n";
    return 0;
}

// ---------------------------------------------------------- sample-tree ----

int run_sample_tree(const ModelFlags& mf, int depth, int samples, std::uint64_t seed,
                    int threads, const std::string& out_dir, const std::string& command) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const ModelConfig cfg = build_model(mf);
    const FixedPointSolution sol = solve_model(cfg, SolverFlags{});
    require_confined(sol);
    const EdgeLaw law = build_edge_law(cfg, sol);
    const std::vector<TreeSample> batch = draw_tree_samples(law, depth, samples, seed, threads);
    ensure_directory(out_dir);

    const TreeBall& ball = *batch.front().ball;
    std::vector<std::string> header;
    header.reserve(static_cast<std::size_t>(ball.size()) + 1);
    header.push_back("sample");
    for (int v = 0; v < ball.size(); ++v)
        header.push_back(v == 0 ? std::string("root") : ball.address(v));
    std::vector<std::vector<double>> rows;
    rows.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<double> row;
        row.reserve(header.size());
        row.push_back(static_cast<double>(i));
        row.insert(row.end(), batch[i].values.begin(), batch[i].values.end());
        rows.push_back(std::move(row));
    }
    const std::string samples_csv = out_dir + "/samples.csv";
    write_csv(samples_csv, header, rows);

    // Covariance between the root and the vertex d steps down the leftmost
    // path; entry 0 is the root variance.
    std::vector<double> root(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) root[i] = batch[i].values[0];
    std::vector<double> covariance;
    for (int d = 0; d <= depth; ++d) {
        const int v = ball.find(std::string(static_cast<std::size_t>(d), '0'));
        std::vector<double> col(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i)
            col[i] = batch[i].values[static_cast<std::size_t>(v)];
        covariance.push_back(d == 0 ? variance(root) : sample_covariance(root, col));
    }

    json summary;
    summary["depth"] = depth;
    summary["samples"] = samples;
    summary["seed"] = seed;
    summary["threads"] = threads;
    summary["covariance"] = covariance;
    if (depth >= 1) {
        json corr = json::array();
        const auto estimates = correlation_by_distance(batch, depth);
        for (int d = 1; d <= depth; ++d) {
            const auto& e = estimates[static_cast<std::size_t>(d - 1)];
            corr.push_back({{"distance", d}, {"value", e.value}, {"se", e.se}});
        }
        summary["correlation"] = corr;
    }
    if (depth >= 2 && samples >= 100000) {
        const MarkovTestResult mt = markov_test(batch);
        summary["markov"] = {{"partial_corr", mt.partial_corr}, {"pass", mt.pass}};
    }
    if (depth >= 2) summary["homogeneity"] = homogeneity_statistic(batch);
    const std::string summary_path = out_dir + "/summary.json";
    {
        std::ofstream outf(summary_path);
        if (!outf) throw std::runtime_error("cannot write " + summary_path);
        outf << summary.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = command;
    manifest.config_path = mf.config_path;
    manifest.seed = seed;
    manifest.outputs = {samples_csv, summary_path};
    manifest.timestamp = manifest_timestamp();
    write_manifest(out_dir, manifest);

    std::cout << "drew " << samples << " samples on the depth-" << depth << " ball ("
              << ball.size() << " vertices)\n";
    if (depth >= 1 && covariance[0] > 0.0)
        std::cout << "covariance ratio cov(1)/cov(0) = "
                  << format_double(covariance[1] / covariance[0]) << "\n";
    std::cout << "wrote " << samples_csv << "\n";
    return 0;
}

// ------------------------------------------------------------- simulate ----

int run_simulate_local(const ModelConfig& cfg, const FixedPointSolution& sol,
                       const std::string& mode_name, int n, double dt, double t_end,
                       std::uint64_t seed, int checkpoints, double bandwidth, bool dump_ensemble,
                       const ModelFlags& mf, const std::string& out_dir,
                       const std::string& command) {
    DriftMode mode;
    if (mode_name == "decoupled")
        mode = DriftMode::decoupled;
    else if (mode_name == "estimated")
        mode = DriftMode::estimated;
    else
        throw std::invalid_argument("unknown mode \"" + mode_name +
                                    "\" (expected decoupled or estimated)");

    const EdgeLaw law = build_edge_law(cfg, sol);
    Rng rng(seed);
    ParticleEnsemble ens = init_from_edge_law(law, n, mode, rng, bandwidth);
    const std::vector<TrajectoryPoint> trace =
        run_local_trajectory(cfg, ens, &sol, law, dt, t_end, checkpoints, rng);
    ensure_directory(out_dir);

    std::vector<std::vector<double>> rows;
    rows.reserve(trace.size());
    for (const auto& p : trace)
        rows.push_back({p.time, p.mean_x, p.var_x, p.cov_xy, p.ks_marginal});
    const std::string traj_csv = out_dir + "/trajectory.csv";
    write_csv(traj_csv, {"time", "mean_x", "var_x", "cov_xy", "ks_marginal"}, rows);

    const double ks = ks_statistic(ens.X, law.rho_X);
    const double sym = ks_two_sample_2d(zip_pairs(ens.X, ens.Y), zip_pairs(ens.Y, ens.X));
    json summary;
    summary["target"] = "local";
    summary["mode"] = to_string(mode);
    summary["N"] = n;
    summary["dt"] = dt;
    summary["t_end"] = t_end;
    summary["seed"] = seed;
    summary["checkpoints"] = checkpoints;
    summary["bandwidth"] = ens.bandwidth;
    summary["ks_marginal"] = ks;
    summary["symmetry_ks"] = sym;
    const std::string summary_path = out_dir + "/summary.json";
    {
        std::ofstream outf(summary_path);
        if (!outf) throw std::runtime_error("cannot write " + summary_path);
        outf << summary.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = command;
    manifest.config_path = mf.config_path;
    manifest.seed = seed;
    manifest.outputs = {traj_csv, summary_path};
    manifest.timestamp = manifest_timestamp();
    if (dump_ensemble) {
        std::vector<std::vector<double>> erows;
        erows.reserve(ens.X.size());
        for (std::size_t i = 0; i < ens.X.size(); ++i)
            erows.push_back({static_cast<double>(i), ens.X[i], ens.Y[i]});
        const std::string ens_csv = out_dir + "/ensemble.csv";
        write_csv(ens_csv, {"index", "X", "Y"}, erows);
        manifest.outputs.push_back(ens_csv);
    }
    write_manifest(out_dir, manifest);

    std::cout << "local " << to_string(mode) << " run to t = " << format_double(ens.time)
              << ": ks_marginal = " << format_double(ks)
              << ", symmetry_ks = " << format_double(sym) << "\n"
              << "wrote " << traj_csv << "\n";
    return 0;
}

int run_simulate_tree(const ModelConfig& cfg, const FixedPointSolution& sol, int depth, int n,
                      double dt, double t_end, std::uint64_t seed, const ModelFlags& mf,
                      const std::string& out_dir, const std::string& command) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (n < 2) throw std::invalid_argument("N must be >= 2");
    const EdgeLaw law = build_edge_law(cfg, sol);
    TreeGibbsSampler sampler(law, depth);

    std::vector<double> roots(static_cast<std::size_t>(n));
    std::vector<double> escaped(static_cast<std::size_t>(n), 0.0);
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(sampler.ball()->size()));
    int escapes = 0;
    for (int i = 0; i < n; ++i) {
        Rng draw_rng = Rng::stream(seed, 2 * static_cast<std::uint64_t>(i));
        const TreeSample init = sampler.draw(draw_rng);
        const std::uint64_t sde_seed = Rng::stream(seed, 2 * static_cast<std::uint64_t>(i) + 1).raw();
        const TreeSdeState state = simulate_tree_sde(cfg, sol, depth, dt, t_end, init, sde_seed);
        roots[static_cast<std::size_t>(i)] = state.values[0];
        escaped[static_cast<std::size_t>(i)] = state.escaped ? 1.0 : 0.0;
        escapes += state.escaped ? 1 : 0;
        pooled.insert(pooled.end(), state.values.begin(), state.values.end());
    }
    ensure_directory(out_dir);

    std::vector<std::vector<double>> rows;
    rows.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
        rows.push_back({static_cast<double>(i), roots[i], escaped[i]});
    const std::string roots_csv = out_dir + "/roots.csv";
    write_csv(roots_csv, {"replica", "root", "escaped"}, rows);

    const double root_ks = ks_statistic(roots, law.rho_X);
    const double pooled_ks = ks_statistic(pooled, law.rho_X);
    json summary;
    summary["target"] = "tree";
    summary["depth"] = depth;
    summary["N"] = n;
    summary["dt"] = dt;
    summary["t_end"] = t_end;
    summary["seed"] = seed;
    summary["root_ks"] = root_ks;
    summary["pooled_ks"] = pooled_ks;
    summary["escape_fraction"] = static_cast<double>(escapes) / static_cast<double>(n);
    const std::string summary_path = out_dir + "/summary.json";
    {
        std::ofstream outf(summary_path);
        if (!outf) throw std::runtime_error("cannot write " + summary_path);
        outf << summary.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = command;
    manifest.config_path = mf.config_path;
    manifest.seed = seed;
    manifest.outputs = {roots_csv, summary_path};
    manifest.timestamp = manifest_timestamp();
    write_manifest(out_dir, manifest);

    std::cout << n << " replicas on the depth-" << depth << " ball: root_ks = "
              << format_double(root_ks) << ", pooled_ks = " << format_double(pooled_ks)
              << ", escape fraction " << format_double(summary["escape_fraction"].get<double>())
              << "\n"
              << "wrote " << roots_csv << "\n";
    return 0;
}

// --------------------------------------------------------------- verify ----

int run_verify(bool all, const std::string& check_name) {
    if (!all && check_name.empty())
        throw std::invalid_argument("pass --all or --check NAME (see --help)");
    std::vector<CheckResult> results;
    if (all)
        results = run_all_checks();
    else
        results.push_back(run_check(check_name));
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "\n";
        if (!r.details.empty()) {
            std::istringstream lines(r.details);
            std::string line;
            while (std::getline(lines, line)) std::cout << "       " << line << "\n";
        }
    }
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << " (" << results.size()
              << " run)\n";
    return ok ? 0 : 2;
}

// ------------------------------------------------------------ analytics ----

int run_analytics(bool kesten_mckay, bool dyson, bool linear, int m, double z,
                  const std::string& confinement, int points, const std::string& out_dir,
                  const std::string& command) {
    const int chosen = (kesten_mckay ? 1 : 0) + (dyson ? 1 : 0) + (linear ? 1 : 0);
    if (chosen != 1)
        throw std::invalid_argument(
            "pass exactly one of --kesten-mckay, --dyson or --linear");
    if (m < 2) throw std::invalid_argument("m must be >= 2");
    ensure_directory(out_dir);

    RunManifest manifest;
    manifest.command = command;
    manifest.timestamp = manifest_timestamp();

    if (kesten_mckay) {
        const KestenMcKayCurve curve = kesten_mckay_curve(m, points);
        std::vector<std::vector<double>> rows;
        rows.reserve(curve.x.size());
        double mass_sum = 0.0;
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            rows.push_back({curve.x[i], curve.density[i], curve.mass[i]});
            mass_sum += curve.mass[i];
        }
        const std::string path = out_dir + "/kesten_mckay_m" + std::to_string(m) + ".csv";
        write_csv(path, {"x", "density", "mass"}, rows);
        manifest.outputs = {path};
        write_manifest(out_dir, manifest);
        std::cout << "spectral density at m = " << m << ", total mass "
                  << format_double(mass_sum) << "\n"
                  << "wrote " << path << "\n";
        return 0;
    }

    if (dyson) {
        ModelConfig cfg;
        if (confinement == "gaussian")
            cfg = make_dyson_model(
                m, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
        else if (confinement == "quartic")
            cfg = make_dyson_model(
                m, [](double x) { return 0.25 * x * x * x * x; },
                [](double x) { return x * x * x; });
        else
            throw std::invalid_argument("unknown dyson confinement \"" + confinement +
                                        "\" (expected gaussian or quartic)");
        const DysonReport rep = dyson_report(cfg);
        json j;
        j["m"] = rep.m;
        j["confinement"] = confinement;
        j["moments"] = rep.moments;
        j["poly_coeffs"] = rep.poly_coeffs;
        j["r"] = rep.r;
        j["lambda"] = rep.lambda;
        const std::string path =
            out_dir + "/dyson_m" + std::to_string(m) + "_" + confinement + ".json";
        {
            std::ofstream outf(path);
            if (!outf) throw std::runtime_error("cannot write " + path);
            outf << j.dump(2) << '\n';
        }
        manifest.outputs = {path};
        write_manifest(out_dir, manifest);
        std::cout << "r = " << format_double(rep.r) << ", lambda = " << format_double(rep.lambda)
                  << "\n"
                  << "wrote " << path << "\n";
        return 0;
    }

    const LinearCaseReport rep = linear_report(m, z);
    json j;
    j["m"] = rep.m;
    j["z"] = rep.z;
    j["regime"] = to_string(rep.regime);
    if (rep.rho_plus) j["rho_plus"] = *rep.rho_plus;
    if (rep.rho_minus) j["rho_minus"] = *rep.rho_minus;
    if (rep.sigma2_plus) j["sigma2_plus"] = *rep.sigma2_plus;
    if (rep.sigma2_minus) j["sigma2_minus"] = *rep.sigma2_minus;
    if (rep.resolvent) j["resolvent"] = *rep.resolvent;
    if (rep.extendable_plus) j["extendable_plus"] = *rep.extendable_plus;
    if (rep.extendable_minus) j["extendable_minus"] = *rep.extendable_minus;
    const std::string path = out_dir + "/linear_report.json";
    {
        std::ofstream outf(path);
        if (!outf) throw std::runtime_error("cannot write " + path);
        outf << j.dump(2) << '\n';
    }
    manifest.outputs = {path};
    write_manifest(out_dir, manifest);
    std::cout << "regime " << to_string(rep.regime) << " at m = " << m
              << ", z = " << format_double(z) << "\n"
              << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string command = join_args(argc, argv);

    CLI::App app{"stationary laws of interacting diffusions on regular trees"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run the fixed-point solver and export F");
    ModelFlags solve_model_flags;
    SolverFlags solver_flags;
    std::string solve_out = "out/solve";
    bool emit_law = false;
    add_model_flags(solve_cmd, solve_model_flags);
    add_solver_flags(solve_cmd, solver_flags);
    solve_cmd->add_option("--out", solve_out, "output directory");
    solve_cmd->add_flag("--emit-law", emit_law,
                        "also export the edge law (rho matrix, boundary law, marginal)");

    // sample-tree
    auto* tree_cmd = app.add_subcommand("sample-tree", "exact samples of the field on a ball");
    ModelFlags tree_model_flags;
    int tree_depth = 2;
    int tree_samples = 10000;
    std::uint64_t tree_seed = 1;
    int tree_threads = default_threads();
    std::string tree_out = "out/sample-tree";
    add_model_flags(tree_cmd, tree_model_flags);
    tree_cmd->add_option("--depth", tree_depth, "ball radius around the root");
    tree_cmd->add_option("--samples", tree_samples, "number of independent draws");
    tree_cmd->add_option("--seed", tree_seed, "master seed (per-sample streams derive from it)");
    tree_cmd->add_option("--threads", tree_threads,
                         "worker threads (default: TREELAW_THREADS or 1)");
    tree_cmd->add_option("--out", tree_out, "output directory");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Euler-Maruyama dynamics");
    ModelFlags sim_model_flags;
    std::string sim_target = "local";
    std::string sim_mode = "decoupled";
    int sim_n = 10000;
    double sim_dt = 1e-3;
    double sim_t = 1.0;
    std::uint64_t sim_seed = 1;
    int sim_depth = 2;
    int sim_checkpoints = 20;
    double sim_bandwidth = 0.0;
    bool sim_dump = false;
    std::string sim_out = "out/simulate";
    add_model_flags(sim_cmd, sim_model_flags);
    sim_cmd->add_option("--target", sim_target, "local (pair dynamics) | tree (truncated ball)")
        ->check(CLI::IsMember({"local", "tree"}));
    sim_cmd->add_option("--mode", sim_mode, "local drift: decoupled | estimated");
    sim_cmd->add_option("--N", sim_n, "particle pairs (local) or replicas (tree)");
    sim_cmd->add_option("--dt", sim_dt, "Euler step");
    sim_cmd->add_option("--T", sim_t, "time horizon");
    sim_cmd->add_option("--seed", sim_seed, "seed");
    sim_cmd->add_option("--depth", sim_depth, "ball radius (tree target)");
    sim_cmd->add_option("--checkpoints", sim_checkpoints, "trajectory rows after t = 0 (local)");
    sim_cmd->add_option("--bandwidth", sim_bandwidth,
                        "regression bandwidth, 0 = Silverman default (estimated mode)");
    sim_cmd->add_flag("--dump-ensemble", sim_dump, "also write the final (X, Y) ensemble");
    sim_cmd->add_option("--out", sim_out, "output directory");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "self-checks against closed forms");
    bool verify_all = false;
    std::string verify_check;
    verify_cmd->add_flag("--all", verify_all, "run every check");
    verify_cmd->add_option("--check", verify_check, "run one named check");

    // analytics
    auto* ana_cmd = app.add_subcommand("analytics", "spectral and moment reports");
    bool ana_km = false;
    bool ana_dyson = false;
    bool ana_linear = false;
    int ana_m = 3;
    double ana_z = 4.0;
    std::string ana_conf = "gaussian";
    int ana_points = 2001;
    std::string ana_out = "out/analytics";
    ana_cmd->add_flag("--kesten-mckay", ana_km, "spectral density curve as CSV");
    ana_cmd->add_flag("--dyson", ana_dyson, "moment-polynomial report as JSON");
    ana_cmd->add_flag("--linear", ana_linear, "closed-form case report as JSON");
    ana_cmd->add_option("--m", ana_m, "branching number");
    ana_cmd->add_option("--z", ana_z, "confinement strength (--linear)");
    ana_cmd->add_option("--U", ana_conf, "dyson confinement: gaussian | quartic");
    ana_cmd->add_option("--points", ana_points, "curve resolution (--kesten-mckay)");
    ana_cmd->add_option("--out", ana_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve_cmd->parsed())
            return run_solve(solve_model_flags, solver_flags, solve_out, emit_law, command);
        if (tree_cmd->parsed())
            return run_sample_tree(tree_model_flags, tree_depth, tree_samples, tree_seed,
                                   tree_threads, tree_out, command);
        if (sim_cmd->parsed()) {
            if (sim_dt <= 0.0) throw std::invalid_argument("dt must be positive");
            if (sim_t < 0.0) throw std::invalid_argument("T must be >= 0");
            const ModelConfig cfg = build_model(sim_model_flags);
            const FixedPointSolution sol = solve_model(cfg, SolverFlags{});
            require_confined(sol);
            if (sim_target == "tree")
                return run_simulate_tree(cfg, sol, sim_depth, sim_n, sim_dt, sim_t, sim_seed,
                                         sim_model_flags, sim_out, command);
            return run_simulate_local(cfg, sol, sim_mode, sim_n, sim_dt, sim_t, sim_seed,
                                      sim_checkpoints, sim_bandwidth, sim_dump, sim_model_flags,
                                      sim_out, command);
        }
        if (verify_cmd->parsed()) return run_verify(verify_all, verify_check);
        if (ana_cmd->parsed())
            return run_analytics(ana_km, ana_dyson, ana_linear, ana_m, ana_z, ana_conf,
                                 ana_points, ana_out, command);
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
