#include "treelaw/local_sim.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "treelaw/stats.hpp"

namespace treelaw {

namespace {

constexpr double kClipBelow = 1e-4;   // |X−Y| floor for the log-repulsive K′
constexpr double kBinScale = 0x1p40;  // fixed-point quantum for bin sums

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// One standard normal keyed on (step draw, own value, partner value). The
// chain is ordered, so the key of (v, w) differs from that of (w, v).
double field_normal(std::uint64_t step_seed, double v, double w) {
    const std::uint64_t kv = mix64(step_seed ^ mix64(std::bit_cast<std::uint64_t>(v)));
    const std::uint64_t kw = mix64(kv ^ mix64(std::bit_cast<std::uint64_t>(w)));
    const double u1 = (static_cast<double>(kw >> 11) + 1.0) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(mix64(kw) >> 11) * 0x1p-53;   // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double clipped_difference(const ModelConfig& cfg, double u) {
    if (cfg.potentials.K.kind == PotentialKind::log_repulsive && std::abs(u) < kClipBelow)
        return std::copysign(kClipBelow, u);
    return u;
}

void check_arrays(const ParticleEnsemble& ens, const char* who) {
    if (ens.X.empty()) throw std::invalid_argument(std::string(who) + ": empty ensemble");
    if (ens.X.size() != ens.Y.size())
        throw std::invalid_argument(std::string(who) + ": X and Y must have equal length");
}

double sample_cov(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mx = mean(x);
    const double my = mean(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(n - 1);
}

std::vector<std::pair<double, double>> zip(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    std::vector<std::pair<double, double>> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {x[i], y[i]};
    return out;
}

int step_count(double dt, double t_end) {
    return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

std::string to_string(DriftMode mode) {
    return mode == DriftMode::decoupled ? "decoupled" : "estimated";
}

ParticleEnsemble init_from_edge_law(const EdgeLaw& law, int n, DriftMode mode, Rng& rng,
                                    double bandwidth) {
    if (n < 1) throw std::invalid_argument("init_from_edge_law: n must be positive");
    const EdgeSampler sampler(law);
    ParticleEnsemble ens;
    ens.mode = mode;
    ens.X.resize(static_cast<std::size_t>(n));
    ens.Y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = sampler.draw_root(rng);
        ens.X[static_cast<std::size_t>(i)] = x;
        ens.Y[static_cast<std::size_t>(i)] = sampler.draw_child(x, rng);
    }
    if (mode == DriftMode::estimated)
        ens.bandwidth = bandwidth > 0.0
                            ? bandwidth
                            : std::pow(static_cast<double>(n), -0.2) *
                                  std::sqrt(variance(ens.X));
    return ens;
}

GridFunction conditional_drift_estimate(const ModelConfig& cfg, const std::vector<double>& X,
                                        const std::vector<double>& Y, double bandwidth) {
    if (X.size() != Y.size())
        throw std::invalid_argument("conditional_drift_estimate: X and Y must have equal length");
    if (X.size() < 100) throw std::invalid_argument("ensemble too small for regression");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("conditional_drift_estimate: bandwidth must be positive");

    const Grid& grid = cfg.grid;
    const int n = grid.n;
    const double h = grid.step();

    // linear binning of (regressand, count) in order-free fixed point
    std::vector<__int128> num(static_cast<std::size_t>(n), 0);
    std::vector<__int128> den(static_cast<std::size_t>(n), 0);
    auto deposit = [&](double x, double value) {
        double pos = (x - grid.lo) / h;
        if (pos < 0.0) pos = 0.0;
        if (pos > static_cast<double>(n - 1)) pos = static_cast<double>(n - 1);
        int b = static_cast<int>(pos);
        if (b > n - 2) b = n - 2;
        const double f = pos - static_cast<double>(b);
        const std::size_t k = static_cast<std::size_t>(b);
        num[k] += static_cast<__int128>(std::llround(value * (1.0 - f) * kBinScale));
        num[k + 1] += static_cast<__int128>(std::llround(value * f * kBinScale));
        den[k] += static_cast<__int128>(std::llround((1.0 - f) * kBinScale));
        den[k + 1] += static_cast<__int128>(std::llround(f * kBinScale));
    };
    const Potential& K = cfg.potentials.K;
    for (std::size_t i = 0; i < X.size(); ++i) {
        deposit(X[i], K.d(clipped_difference(cfg, X[i] - Y[i])));
        deposit(Y[i], K.d(clipped_difference(cfg, Y[i] - X[i])));
    }

    // Gaussian smoothing of both binned arrays; the kernel normalization
    // cancels in the ratio, so raw exponential taps suffice
    int reach = static_cast<int>(std::ceil(6.0 * bandwidth / h));
    if (reach > n - 1) reach = n - 1;
    std::vector<double> taps(static_cast<std::size_t>(reach) + 1);
    for (int k = 0; k <= reach; ++k) {
        const double u = static_cast<double>(k) * h / bandwidth;
        taps[static_cast<std::size_t>(k)] = std::exp(-0.5 * u * u);
    }
    GridFunction g(grid);
    for (int i = 0; i < n; ++i) {
        double top = 0.0;
        double bottom = 0.0;
        const int k_lo = std::max(0, i - reach);
        const int k_hi = std::min(n - 1, i + reach);
        for (int k = k_lo; k <= k_hi; ++k) {
            const double t = taps[static_cast<std::size_t>(std::abs(k - i))];
            top += t * static_cast<double>(num[static_cast<std::size_t>(k)]);
            bottom += t * static_cast<double>(den[static_cast<std::size_t>(k)]);
        }
        g[i] = bottom > 0.0 ? top / bottom : 0.0;
    }
    return g;
}

ParticleEnsemble step_local(const ModelConfig& cfg, const ParticleEnsemble& ens,
                            const FixedPointSolution* sol, double dt, Rng& rng) {
    check_arrays(ens, "step_local");
    if (!(dt > 0.0)) throw std::invalid_argument("step_local: dt must be positive");

    GridFunction g;
    if (ens.mode == DriftMode::decoupled) {
        if (sol == nullptr)
            throw std::invalid_argument("step_local: decoupled mode needs a solved fixed point");
        if (!(sol->F.grid == cfg.grid))
            throw std::invalid_argument("step_local: solution grid must match the model grid");
        g = derivative_centered(sol->F);
    } else {
        if (ens.size() < 100) throw std::invalid_argument("ensemble too small for regression");
        if (!(ens.bandwidth > 0.0))
            throw std::invalid_argument("step_local: bandwidth must be positive in estimated mode");
        g = conditional_drift_estimate(cfg, ens.X, ens.Y, ens.bandwidth);
    }

    const Potential& U = cfg.potentials.U;
    const Potential& K = cfg.potentials.K;
    const double weight = static_cast<double>(cfg.m - 1);
    const double scale = std::sqrt(2.0 * dt);
    const std::uint64_t step_seed = rng.raw();

    ParticleEnsemble out = ens;
    out.time = ens.time + dt;
    for (std::size_t i = 0; i < ens.X.size(); ++i) {
        const double x = ens.X[i];
        const double y = ens.Y[i];
        const double drift_x = -(U.d(x) + K.d(clipped_difference(cfg, x - y)) +
                                 weight * g.eval_extrapolate(x));
        const double drift_y = -(U.d(y) + K.d(clipped_difference(cfg, y - x)) +
                                 weight * g.eval_extrapolate(y));
        out.X[i] = x + dt * drift_x + scale * field_normal(step_seed, x, y);
        out.Y[i] = y + dt * drift_y + scale * field_normal(step_seed, y, x);
    }
    return out;
}

StationarityReport run_stationarity_test(const ModelConfig& cfg, const FixedPointSolution& sol,
                                         const EdgeLaw& law, int n, double dt, double t_end,
                                         DriftMode mode, Rng& rng) {
    if (n < 1000) throw std::invalid_argument("run_stationarity_test: n must be >= 1000");
    if (!(dt > 0.0)) throw std::invalid_argument("run_stationarity_test: dt must be positive");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("run_stationarity_test: t_end must be nonnegative");
    if (!(law.grid == cfg.grid))
        throw std::invalid_argument("run_stationarity_test: law grid must match the model grid");

    ParticleEnsemble ens = init_from_edge_law(law, n, mode, rng);
    const int steps = step_count(dt, t_end);
    for (int s = 0; s < steps; ++s) ens = step_local(cfg, ens, &sol, dt, rng);

    StationarityReport report;
    report.ks_marginal = ks_statistic(ens.X, law.rho_X);
    report.symmetry_ks = ks_two_sample_2d(zip(ens.X, ens.Y), zip(ens.Y, ens.X));
    return report;
}

std::vector<TrajectoryPoint> run_local_trajectory(const ModelConfig& cfg, ParticleEnsemble& ens,
                                                  const FixedPointSolution* sol,
                                                  const EdgeLaw& law, double dt, double t_end,
                                                  int checkpoints, Rng& rng) {
    check_arrays(ens, "run_local_trajectory");
    if (!(dt > 0.0)) throw std::invalid_argument("run_local_trajectory: dt must be positive");
    if (checkpoints < 1)
        throw std::invalid_argument("run_local_trajectory: checkpoints must be positive");

    const int steps = step_count(dt, t_end);
    auto summarize = [&]() {
        TrajectoryPoint p;
        p.time = ens.time;
        p.mean_x = mean(ens.X);
        p.var_x = ens.size() > 1 ? variance(ens.X) : 0.0;
        p.cov_xy = sample_cov(ens.X, ens.Y);
        p.ks_marginal = ks_statistic(ens.X, law.rho_X);
        return p;
    };

    std::vector<TrajectoryPoint> trace;
    trace.reserve(static_cast<std::size_t>(checkpoints) + 1);
    trace.push_back(summarize());
    int recorded = 0;
    for (int s = 1; s <= steps; ++s) {
        ens = step_local(cfg, ens, sol, dt, rng);
        const int due = static_cast<int>((static_cast<long long>(s) * checkpoints) / steps);
        if (due > recorded) {
            trace.push_back(summarize());
            recorded = due;
        }
    }
    return trace;
}

}  // namespace treelaw
