#include "treelaw/edge_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treelaw {

EdgeLaw build_edge_law(const ModelConfig& cfg, const FixedPointSolution& sol) {
    cfg.validate();
    if (!(sol.F.grid == cfg.grid))
        throw std::invalid_argument("build_edge_law: solution not on the model grid");

    const int n = cfg.grid.n;
    EdgeLaw law;
    law.grid = cfg.grid;
    law.m = cfg.m;
    law.F = sol.F;
    law.C1 = sol.C;
    {
        const Potential K = cfg.potentials.K;
        const bool square = cfg.square_weight_kernel();
        law.weight = [K, square](double u) { return square ? u * u : std::exp(-K(u)); };
    }

    law.a = GridFunction(cfg.grid);
    law.l = GridFunction(cfg.grid);
    for (int i = 0; i < n; ++i) {
        const double x = cfg.grid.x(i);
        const double u = cfg.potentials.U(x);
        law.a[i] = std::exp(-u - (cfg.m - 1) * sol.F[i]);
        law.l[i] = std::exp(-u / cfg.m - sol.F[i]);
        if (!std::isfinite(law.a[i])) throw std::runtime_error("normalization diverges");
    }

    const auto wtab = cfg.interaction_weight_table();
    const auto qw = quadrature_weights(cfg.grid);

    law.rho.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* wrow = wtab.data() + (i + n - 1);
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = law.a[i] * law.a[j] * wrow[-j];
            law.rho[static_cast<std::size_t>(i) * n + j] = v;
            row += qw[static_cast<std::size_t>(j)] * v;
        }
        z += qw[static_cast<std::size_t>(i)] * row;
    }
    if (!std::isfinite(z) || !(z > 0.0)) throw std::runtime_error("normalization diverges");
    law.Z = z;
    law.C2 = z * std::exp(-sol.C);
    for (auto& v : law.rho) v /= z;

    law.rho_X = GridFunction(cfg.grid);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = law.rho.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) acc += qw[static_cast<std::size_t>(j)] * row[j];
        law.rho_X[i] = acc;
    }

    // |K′|^{3/2} against ρ; the diagonal term is zero in the log-repulsive
    // kind (ρ(t,t) = 0 exactly) and K′(0) = 0 in the smooth kinds.
    const bool logrep = cfg.potentials.K.kind == PotentialKind::log_repulsive;
    const double beta = cfg.potentials.K.beta;
    double tech = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = cfg.grid.x(i) - cfg.grid.x(j);
            const double kp = logrep ? beta / std::abs(d) : std::abs(cfg.potentials.K.d(d));
            row += qw[static_cast<std::size_t>(j)] * kp * std::sqrt(kp) * law.rho_at(i, j);
        }
        tech += qw[static_cast<std::size_t>(i)] * row;
    }
    law.tech_integral = tech;
    return law;
}

double boundary_law_residual(const EdgeLaw& law, const ModelConfig& cfg) {
    if (!(law.grid == cfg.grid))
        throw std::invalid_argument("boundary_law_residual: law/config grid mismatch");
    const int n = law.grid.n;
    const auto wtab = cfg.interaction_weight_table();
    const auto qw = quadrature_weights(law.grid);

    std::vector<double> eum(static_cast<std::size_t>(n));  // e^{−U/m}
    std::vector<double> lm1(static_cast<std::size_t>(n));  // l^{m−1}
    for (int i = 0; i < n; ++i) {
        eum[static_cast<std::size_t>(i)] = std::exp(-cfg.potentials.U(law.grid.x(i)) / law.m);
        lm1[static_cast<std::size_t>(i)] = std::pow(law.l[i], law.m - 1);
    }

    const double ec = std::exp(-law.C1);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* wrow = wtab.data() + (i + n - 1);
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += qw[static_cast<std::size_t>(j)] * wrow[-j] * eum[static_cast<std::size_t>(j)] *
                   lm1[static_cast<std::size_t>(j)];
        const double lhs = ec * eum[static_cast<std::size_t>(i)] * acc;
        sup = std::max(sup, std::abs(lhs - law.l[i]) / law.l[i]);
    }
    return sup;
}

double consistency_check(const EdgeLaw& law, const ModelConfig& cfg) {
    if (!(law.grid == cfg.grid))
        throw std::invalid_argument("consistency_check: law/config grid mismatch");
    const int n = law.grid.n;
    const auto wtab = cfg.interaction_weight_table();
    const auto qw = quadrature_weights(law.grid);

    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* wrow = wtab.data() + (i + n - 1);
        double mass = 0.0;  // ∫ κ(y|x_i) dy
        for (int j = 0; j < n; ++j)
            mass += qw[static_cast<std::size_t>(j)] * law.a[j] * wrow[-j];
        mass *= std::exp(law.F[i] - law.C1);
        sup = std::max(sup, std::abs(std::pow(mass, law.m) - 1.0));
    }
    return sup;
}

GridFunction conditional_kernel(const EdgeLaw& law, double x) {
    if (x < law.grid.lo || x > law.grid.hi)
        throw std::invalid_argument("conditional_kernel: x outside the grid");
    const int n = law.grid.n;
    GridFunction kappa(law.grid);
    const double scale = std::exp(law.F(x) - law.C1);
    for (int j = 0; j < n; ++j) kappa[j] = scale * law.a[j] * law.weight(x - law.grid.x(j));
    // Conditioning is normalized by definition; the mass defect of the raw
    // formula (zero exactly when F solves the fixed point at x) is what
    // consistency_check reports, so it is not silently re-imposed there.
    const double mass = integrate(kappa);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::runtime_error("conditional_kernel: kernel mass underflow");
    for (auto& v : kappa.values) v /= mass;
    return kappa;
}

EdgeSampler::EdgeSampler(const EdgeLaw& law)
    : grid_(law.grid), marginal_(law.rho_X) {
    conditional_.reserve(static_cast<std::size_t>(grid_.n));
    for (int i = 0; i < grid_.n; ++i) {
        GridFunction kappa(grid_);
        const double scale = std::exp(law.F[i] - law.C1);
        const double xi = grid_.x(i);
        for (int j = 0; j < grid_.n; ++j)
            kappa[j] = scale * law.a[j] * law.weight(xi - grid_.x(j));
        conditional_.emplace_back(kappa);
    }
}

double EdgeSampler::draw_child(double parent, Rng& rng) const {
    const double u = rng.uniform();
    const double h = grid_.step();
    double s = (parent - grid_.lo) / h;
    s = std::clamp(s, 0.0, static_cast<double>(grid_.n - 1));
    const int i = std::min(static_cast<int>(s), grid_.n - 2);
    const double t = s - i;
    const double q0 = conditional_[static_cast<std::size_t>(i)].quantile(u);
    const double q1 = conditional_[static_cast<std::size_t>(i) + 1].quantile(u);
    return (1.0 - t) * q0 + t * q1;
}

}  // namespace treelaw
