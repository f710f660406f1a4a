#include "treelaw/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "treelaw/analytics.hpp"
#include "treelaw/io.hpp"
#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/local_sim.hpp"
#include "treelaw/numerics.hpp"
#include "treelaw/stats.hpp"
#include "treelaw/tree.hpp"

namespace treelaw {

namespace {

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

/// Least-squares curvature of F against a*x^2/2 over |x| <= span.
double fit_curvature(const GridFunction& F, double span) {
    double sxf = 0.0;
    double sx4 = 0.0;
    for (int i = 0; i < F.size(); ++i) {
        const double x = F.grid.x(i);
        if (std::abs(x) > span) continue;
        sxf += F[i] * x * x;
        sx4 += x * x * x * x;
    }
    return 2.0 * sxf / sx4;
}

GridFunction closed_form_linear_F(const ModelConfig& cfg) {
    const auto report = linear_report(cfg.m, cfg.potentials.U.coeff + cfg.m);
    const double alpha = 1.0 - *report.rho_plus;
    return tabulate(cfg.grid, [alpha](double x) { return 0.5 * alpha * x * x; });
}

CheckResult check_fixed_point_linear() {
    CheckResult r{"fixed-point-linear", false, ""};
    const auto cfg = make_linear_model(3, 4.0);
    const auto sol = solve_picard(cfg);
    const auto exact = closed_form_linear_F(cfg);
    double sup = 0.0;
    for (int i = 0; i < exact.size(); ++i) {
        const double x = cfg.grid.x(i);
        if (std::abs(x) > 6.0) continue;
        sup = std::max(sup, std::abs(sol.F[i] - exact[i]));
    }
    r.pass = sol.converged && sup < 1e-3;
    r.details = "picard m=3 z=4: sup|F - closed form| = " + num(sup) + " on [-6,6], " +
                std::to_string(sol.iterations) + " iterations, residual " + num(sol.residual);
    return r;
}

CheckResult check_resolvent_identity() {
    CheckResult r{"resolvent-identity", true, ""};
    std::ostringstream d;
    const std::pair<int, double> probes[] = {{3, 4.0}, {3, 5.0}, {4, 5.0}, {4, 6.0},
                                             {2, 3.0}, {3, 2.9}, {6, 8.0}};
    for (const auto& [m, z] : probes) {
        const auto report = linear_report(m, z);
        const double lhs = resolvent(m, z);
        const double rhs = *report.sigma2_plus;
        const double err = std::abs(lhs - rhs);
        if (!(err < 1e-12)) r.pass = false;
        d << "m=" << m << " z=" << num(z) << " lhs=" << format_double(lhs)
          << " rhs=" << format_double(rhs) << " err=" << num(err) << "\n";
    }
    r.details = d.str();
    return r;
}

CheckResult check_kesten_mckay_mass() {
    CheckResult r{"kesten-mckay-mass", true, ""};
    std::ostringstream d;
    for (int m : {2, 3, 4}) {
        const double mass = kesten_mckay_mass(m);
        const double m2 = kesten_mckay_moment(m, 2);
        if (!(std::abs(mass - 1.0) < 1e-6 && std::abs(m2 - m) < 1e-4)) r.pass = false;
        d << "m=" << m << " mass=" << format_double(mass) << " second moment=" << num(m2)
          << " (target " << m << ")\n";
    }
    r.details = d.str();
    return r;
}

CheckResult check_stieltjes_transform() {
    CheckResult r{"stieltjes-transform", true, ""};
    std::ostringstream d;
    const std::pair<int, double> probes[] = {{3, 4.0}, {3, 10.0}, {2, 3.0}};
    for (const auto& [m, z] : probes) {
        const auto chk = stieltjes_check(m, z);
        if (!(chk.err < 1e-4)) r.pass = false;
        d << "m=" << m << " z=" << num(z) << " integral=" << format_double(chk.lhs)
          << " resolvent=" << format_double(chk.rhs) << " err=" << num(chk.err) << "\n";
    }
    r.details = d.str();
    return r;
}

CheckResult check_dyson_gaussian_m2() {
    CheckResult r{"dyson-gaussian-m2", false, ""};
    const auto cfg = make_dyson_model(
        2, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
    const auto report = dyson_report(cfg);
    const double root_err = std::abs(report.r - std::sqrt(3.0));
    const double rr = report.r;
    const auto F = tabulate(cfg.grid, [rr](double x) { return -std::log((x * x + rr) / rr); });
    const auto TF = apply_T(cfg, F);
    double residual = 0.0;
    for (int i = 0; i < F.size(); ++i) residual = std::max(residual, std::abs(TF[i] - F[i]));
    r.pass = root_err < 1e-8 && residual < 1e-6;
    r.details = "r = " + format_double(report.r) + " (sqrt(3) err " + num(root_err) +
                "), fixed-point residual of -log((x^2+r)/r) = " + num(residual);
    return r;
}

CheckResult check_dyson_gaussian_m3() {
    CheckResult r{"dyson-gaussian-m3", false, ""};
    const auto cfg = make_dyson_model(
        3, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
    const auto report = dyson_report(cfg);
    const auto& c = report.poly_coeffs;
    const bool signs = c.size() == 4 && c[0] > 0.0 && c[1] > 0.0 && c[2] < 0.0 && c[3] < 0.0;

    // independent oracle: fixed-step sign scan over [0, 10]
    double scan_root = -1.0;
    double prev = poly_eval(c, 0.0);
    for (long long k = 1; k <= 10000000; ++k) {
        const double t = static_cast<double>(k) * 1e-6;
        const double val = poly_eval(c, t);
        if ((prev <= 0.0) != (val <= 0.0)) {
            scan_root = t - 0.5e-6;
            break;
        }
        prev = val;
    }
    const double scan_err = std::abs(report.r - scan_root);
    r.pass = signs && scan_root > 0.0 && scan_err < 1e-8;
    r.details = std::string("coefficient signs (+,+,-,-): ") + (signs ? "yes" : "NO") +
                ", bisection r = " + format_double(report.r) + ", sign-scan r = " +
                format_double(scan_root) + ", gap " + num(scan_err);
    return r;
}

CheckResult check_boundary_law() {
    CheckResult r{"boundary-law", true, ""};
    std::ostringstream d;

    const auto lin = make_linear_model(3, 4.0);
    const auto lin_rep = linear_report(3, 4.0);
    const double alpha = 1.0 - *lin_rep.rho_plus;
    const auto lin_sol =
        solution_from_closed_form(lin, [alpha](double x) { return 0.5 * alpha * x * x; });
    const auto lin_law = build_edge_law(lin, lin_sol);
    const double lr = boundary_law_residual(lin_law, lin);
    const double lc = consistency_check(lin_law, lin);
    if (!(lr < 1e-5 && lc < 1e-5)) r.pass = false;
    d << "linear m=3 z=4: boundary residual " << num(lr) << ", consistency " << num(lc) << "\n";

    const auto dy = make_dyson_model(
        2, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
    const double rr = dyson_report(dy).r;
    const auto dy_sol = solution_from_closed_form(
        dy, [rr](double x) { return -std::log((x * x + rr) / rr); });
    const auto dy_law = build_edge_law(dy, dy_sol);
    const double dr = boundary_law_residual(dy_law, dy);
    const double dc = consistency_check(dy_law, dy);
    if (!(dr < 1e-5 && dc < 1e-5)) r.pass = false;
    d << "log-repulsive m=2: boundary residual " << num(dr) << ", consistency " << num(dc);
    r.details = d.str();
    return r;
}

CheckResult check_regime_table() {
    CheckResult r{"regime-table", true, ""};
    std::ostringstream d;
    const double edge = 2.0 * std::sqrt(2.0);
    const struct {
        double z;
        LinearRegime want;
    } probes[] = {{4.0, LinearRegime::i},
                  {3.0, LinearRegime::ii},
                  {2.9, LinearRegime::iii},
                  {edge, LinearRegime::iv},
                  {2.0, LinearRegime::v}};
    for (const auto& p : probes) {
        const auto rep = linear_report(3, p.z);
        bool ok = rep.regime == p.want;
        if (rep.rho_plus) {
            const double rho = *rep.rho_plus;
            ok = ok && std::abs(2.0 * rho * rho - p.z * rho + 1.0) < 1e-10;
        }
        if (p.want == LinearRegime::i) ok = ok && rep.extendable_plus.value_or(false);
        if (p.want == LinearRegime::iii)
            ok = ok && rep.extendable_plus.value_or(false) && !rep.extendable_minus.value_or(true);
        if (p.want == LinearRegime::iv) ok = ok && !rep.extendable_plus.value_or(true);
        if (p.want == LinearRegime::ii)
            ok = ok && std::abs(*rep.rho_plus - 0.5) < 1e-12 &&
                 std::abs(*rep.sigma2_plus - 2.0 / 3.0) < 1e-12;
        if (!ok) r.pass = false;
        d << "z=" << num(p.z) << " regime " << to_string(rep.regime) << " (want "
          << to_string(p.want) << ")" << (ok ? "" : " MISMATCH") << "\n";
    }
    r.details = d.str();
    return r;
}

CheckResult check_solver_equivalence_m2() {
    CheckResult r{"solver-equivalence-m2", false, ""};
    const auto cfg = make_linear_model(2, 3.0);
    const auto picard = solve_picard(cfg);
    const auto power = solve_power_m2(cfg);
    double sup = 0.0;
    for (int i = 0; i < picard.F.size(); ++i)
        sup = std::max(sup, std::abs(picard.F[i] - power.F[i]));

    const double a_hat = fit_curvature(picard.F, 2.0);
    const double rho_hat = 1.0 - a_hat;
    const double defect = std::abs(rho_hat * rho_hat - 3.0 * rho_hat + 1.0);
    r.pass = picard.converged && power.converged && sup < 1e-6 && defect < 1e-4;
    r.details = "sup|F_picard - F_power| = " + num(sup) + ", fitted curvature " + num(a_hat) +
                ", quadratic defect of 1-curvature: " + num(defect);
    return r;
}

CheckResult check_gauge_invariance() {
    CheckResult r{"gauge-invariance", false, ""};
    const auto cfg = make_linear_model(3, 4.0);
    const auto F = closed_form_linear_F(cfg);
    GridFunction shifted = F;
    for (auto& v : shifted.values) v += 0.37;
    const auto t0 = apply_T(cfg, F);
    const auto t1 = apply_T(cfg, shifted);
    double shift_err = 0.0;
    for (int i = 0; i < t0.size(); ++i)
        shift_err = std::max(shift_err, std::abs(t0[i] - t1[i]));

    const auto dy = make_dyson_model(
        2, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
    const auto dy_shift = make_dyson_model(
        2, [](double x) { return 0.5 * x * x + 0.37; }, [](double x) { return x; });
    const double r_gap = std::abs(dyson_report(dy).r - dyson_report(dy_shift).r);

    const auto sol = solve_picard(cfg);
    double even_err = 0.0;
    for (int i = 0; i < sol.F.size(); ++i)
        even_err = std::max(even_err, std::abs(sol.F[i] - sol.F[sol.F.size() - 1 - i]));

    r.pass = shift_err < 1e-12 && r_gap < 1e-10 && even_err < 1e-7;
    r.details = "shift covariance of the map: " + num(shift_err) +
                ", root shift under confinement rescaling: " + num(r_gap) +
                ", evenness of solved F: " + num(even_err);
    return r;
}

CheckResult check_tree_sampler() {
    CheckResult r{"tree-sampler", false, ""};
    const auto cfg = make_linear_model(3, 4.0);
    const auto rep = linear_report(3, 4.0);
    const double alpha = 1.0 - *rep.rho_plus;
    const auto sol =
        solution_from_closed_form(cfg, [alpha](double x) { return 0.5 * alpha * x * x; });
    const auto law = build_edge_law(cfg, sol);
    const auto batch = draw_tree_samples(law, 2, 100000, 1234501);
    const auto decay = correlation_by_distance(batch, 2);
    const double rho = *rep.rho_plus;
    const bool corr_ok = std::abs(decay[0].value - rho) < 3.0 * decay[0].se &&
                         std::abs(decay[1].value - rho * rho) < 3.0 * decay[1].se;
    const auto markov = markov_test(batch);
    const double hom = homogeneity_statistic(batch);
    r.pass = corr_ok && markov.pass && hom < 0.025;
    r.details = "distance-1 corr " + num(decay[0].value) + " (target " + num(rho) +
                "), distance-2 corr " + num(decay[1].value) + " (target " + num(rho * rho) +
                "), markov partial corr " + num(markov.partial_corr) + ", homogeneity ks " +
                num(hom);
    return r;
}

CheckResult check_local_stationarity() {
    CheckResult r{"local-stationarity", false, ""};
    const auto cfg = make_linear_model(3, 4.0);
    const auto rep = linear_report(3, 4.0);
    const double alpha = 1.0 - *rep.rho_plus;
    const auto sol =
        solution_from_closed_form(cfg, [alpha](double x) { return 0.5 * alpha * x * x; });
    const auto law = build_edge_law(cfg, sol);
    Rng rng(1234502);
    const auto report =
        run_stationarity_test(cfg, sol, law, 4000, 1e-3, 1.0, DriftMode::decoupled, rng);
    r.pass = report.ks_marginal < 0.03 && report.symmetry_ks < 0.03;
    r.details = "decoupled n=4000 t=1: ks_marginal " + num(report.ks_marginal) +
                ", symmetry ks " + num(report.symmetry_ks);
    return r;
}

const std::vector<std::pair<std::string, CheckResult (*)()>>& registry() {
    static const std::vector<std::pair<std::string, CheckResult (*)()>> table = {
        {"fixed-point-linear", &check_fixed_point_linear},
        {"resolvent-identity", &check_resolvent_identity},
        {"kesten-mckay-mass", &check_kesten_mckay_mass},
        {"stieltjes-transform", &check_stieltjes_transform},
        {"dyson-gaussian-m2", &check_dyson_gaussian_m2},
        {"dyson-gaussian-m3", &check_dyson_gaussian_m3},
        {"boundary-law", &check_boundary_law},
        {"regime-table", &check_regime_table},
        {"solver-equivalence-m2", &check_solver_equivalence_m2},
        {"gauge-invariance", &check_gauge_invariance},
        {"tree-sampler", &check_tree_sampler},
        {"local-stationarity", &check_local_stationarity},
    };
    return table;
}

}  // namespace

std::vector<std::string> available_checks() {
    std::vector<std::string> names;
    names.reserve(registry().size());
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

CheckResult run_check(const std::string& name) {
    for (const auto& [key, fn] : registry())
        if (key == name) return fn();
    std::string msg = "unknown check \"" + name + "\"; available checks:";
    for (const auto& [key, fn] : registry()) msg += " " + key;
    throw std::invalid_argument(msg);
}

std::vector<CheckResult> run_all_checks() {
    std::vector<CheckResult> results;
    results.reserve(registry().size());
    for (const auto& [name, fn] : registry()) results.push_back(fn());
    return results;
}

}  // namespace treelaw
