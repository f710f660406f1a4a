#include "treelaw/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace treelaw {

namespace {

// log I on the grid, I(x) = ∫ e^{−U(y) − K(x−y) − (m−1)F(y)} dy, max-shifted.
GridFunction log_kernel_integral(const ModelConfig& cfg, const GridFunction& F) {
    const int n = cfg.grid.n;
    GridFunction expo(cfg.grid);
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double e = -cfg.potentials.U(cfg.grid.x(i)) - (cfg.m - 1) * F[i];
        if (std::isnan(e)) throw std::runtime_error("non-finite integrand in fixed-point map");
        expo[i] = e;
        shift = std::max(shift, e);
    }
    if (!std::isfinite(shift)) throw std::runtime_error("mass underflow in fixed-point map");
    GridFunction g(cfg.grid);
    for (int i = 0; i < n; ++i) g[i] = std::exp(expo[i] - shift);

    GridFunction conv = cfg.square_weight_kernel()
                            ? convolve_square_kernel(g)
                            : convolve_weight_tabulated(g, cfg.interaction_weight_table());

    GridFunction out(cfg.grid);
    for (int i = 0; i < n; ++i) {
        if (!(conv[i] > 0.0) || !std::isfinite(conv[i]))
            throw std::runtime_error("mass underflow in fixed-point map");
        out[i] = shift + std::log(conv[i]);
    }
    return out;
}

double value_at_zero(const GridFunction& f) {
    const int zi = f.grid.index_of_zero();
    if (zi >= 0) return f[zi];
    if (f.grid.lo > 0.0 || f.grid.hi < 0.0)
        throw std::invalid_argument("grid must contain x = 0 for gauging");
    return f(0.0);
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (int i = 0; i < a.grid.n; ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace

TApplication apply_T_full(const ModelConfig& cfg, const GridFunction& F) {
    cfg.validate();
    if (!(F.grid == cfg.grid)) throw std::invalid_argument("apply_T: F not on the model grid");
    const GridFunction logI = log_kernel_integral(cfg, F);
    const double c = value_at_zero(logI);
    TApplication res{GridFunction(cfg.grid), c};
    for (int i = 0; i < cfg.grid.n; ++i) res.T[i] = c - logI[i];
    return res;
}

GridFunction apply_T(const ModelConfig& cfg, const GridFunction& F) {
    return apply_T_full(cfg, F).T;
}

namespace {

void finish_solution(const ModelConfig& cfg, FixedPointSolution& sol) {
    const TApplication fin = apply_T_full(cfg, sol.F);
    sol.residual = sup_diff(fin.T, sol.F);
    sol.C = fin.C;

    GridFunction mass(cfg.grid);
    double peak = 0.0;
    for (int i = 0; i < cfg.grid.n; ++i) {
        mass[i] = std::exp(-cfg.potentials.U(cfg.grid.x(i)) - cfg.m * sol.F[i]);
        peak = std::max(peak, mass[i]);
    }
    sol.integrability = integrate(mass);
    sol.boundary_mass_ratio =
        peak > 0.0 ? std::max(mass[0], mass[cfg.grid.n - 1]) / peak : 1.0;
}

}  // namespace

FixedPointSolution solve_picard(const ModelConfig& cfg, const PicardOptions& opts) {
    cfg.validate();
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw std::invalid_argument("damping must be in (0, 1]");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    FixedPointSolution sol;
    if (opts.init) {
        if (!(opts.init->grid == cfg.grid))
            throw std::invalid_argument("init function not on the model grid");
        sol.F = *opts.init;
        const double g0 = value_at_zero(sol.F);
        for (auto& v : sol.F.values) v -= g0;  // same gauge as the iteration
    } else {
        sol.F = GridFunction(cfg.grid);
    }

    double delta = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iter; ++it) {
        const TApplication step = apply_T_full(cfg, sol.F);
        delta = 0.0;
        for (int i = 0; i < cfg.grid.n; ++i) {
            const double next = (1.0 - opts.damping) * sol.F[i] + opts.damping * step.T[i];
            delta = std::max(delta, std::abs(next - sol.F[i]));
            sol.F[i] = next;
        }
        sol.iterations = it + 1;
        if (delta < opts.tol) {
            sol.converged = true;
            break;
        }
    }
    finish_solution(cfg, sol);
    return sol;
}

FixedPointSolution solve_power_m2(const ModelConfig& cfg, const PowerOptions& opts) {
    cfg.validate();
    if (cfg.m != 2) throw std::invalid_argument("power method applies to m = 2 only");

    const int n = cfg.grid.n;
    GridFunction emu(cfg.grid);  // e^{−U}
    for (int i = 0; i < n; ++i) emu[i] = std::exp(-cfg.potentials.U(cfg.grid.x(i)));

    const bool square = cfg.square_weight_kernel();
    const auto ktab = square ? std::vector<double>() : cfg.interaction_weight_table();

    auto apply_S = [&](const GridFunction& phi) {
        GridFunction g(cfg.grid);
        for (int i = 0; i < n; ++i) g[i] = emu[i] * phi[i];
        return square ? convolve_square_kernel(g) : convolve_weight_tabulated(g, ktab);
    };

    GridFunction phi(cfg.grid);
    for (auto& v : phi.values) v = 1.0;

    FixedPointSolution sol;
    for (int it = 0; it < opts.max_iter; ++it) {
        GridFunction next = apply_S(phi);
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm = std::max(norm, std::abs(next[i]));
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::runtime_error("power iteration collapsed (kernel mass underflow)");
        for (auto& v : next.values) v /= norm;

        const double delta = sup_diff(next, phi);
        phi = next;
        sol.iterations = it + 1;
        if (delta < opts.tol) {
            sol.converged = true;
            break;
        }
    }

    sol.F = GridFunction(cfg.grid);
    for (int i = 0; i < n; ++i) {
        if (!(phi[i] > 0.0))
            throw std::runtime_error("power iteration produced a non-positive eigenfunction");
        sol.F[i] = -std::log(phi[i]);
    }
    const double g0 = value_at_zero(sol.F);
    for (auto& v : sol.F.values) v -= g0;

    // With the gauge φ(0) = 1 the dominant-eigenvalue estimate is
    // Λ = Sφ(0) = ∫ e^{−U−K(0−y)} φ(y) dy, which is exactly the constant
    // finish_solution reads off the map: C = log Λ, same number, same path.
    finish_solution(cfg, sol);
    return sol;
}

FixedPointSolution solution_from_closed_form(const ModelConfig& cfg,
                                             const std::function<double(double)>& F) {
    FixedPointSolution sol;
    sol.F = tabulate(cfg.grid, F);
    const double g0 = value_at_zero(sol.F);
    for (auto& v : sol.F.values) v -= g0;
    sol.converged = true;
    sol.iterations = 0;
    finish_solution(cfg, sol);
    return sol;
}

BandCheck band_check(const ModelConfig& cfg, const FixedPointSolution& sol, double slack) {
    BandCheck bc;
    if (!cfg.potentials.curvature) return bc;
    const auto& cb = *cfg.potentials.curvature;
    bc.applicable = true;
    bc.band_lo = cb.b - cb.c / static_cast<double>(cfg.m - 1);
    bc.band_hi = cb.c;

    const int n = cfg.grid.n;
    const double h2 = cfg.grid.step() * cfg.grid.step();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n; ++i) {
        const double f2 = (sol.F[i + 1] - 2.0 * sol.F[i] + sol.F[i - 1]) / h2;
        lo = std::min(lo, f2);
        hi = std::max(hi, f2);
    }
    bc.f2_min = lo;
    bc.f2_max = hi;
    bc.in_band = (lo >= bc.band_lo - slack) && (hi <= bc.band_hi + slack);
    return bc;
}

}  // namespace treelaw
