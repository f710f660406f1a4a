#include "treelaw/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "treelaw/numerics.hpp"

namespace treelaw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCollar = 1e-12;  // decision collar at the regime boundaries
constexpr int kQuadPoints = 4001;  // odd, so the theta quadrature is Simpson

void require_m(int m, const char* who) {
    if (m < 2) throw std::invalid_argument(std::string(who) + ": m must be >= 2");
}

/// Weight of the cosine substitution x = B cos θ, B = 2√(m−1): integrating
/// f against the spectral density equals ∫₀^π f(B cos θ)·km_weight(θ) dθ.
/// The denominator is written as (m−2)² + B² sin²θ rather than m² − B² cos²θ;
/// the two are identical in exact arithmetic, but the second cancels
/// catastrophically near θ ∈ {0, π} when m = 2, exactly where the x-space
/// density blows up. In the m = 2 case the ratio collapses to the constant
/// 1/π (the arcsine law in disguise).
double km_weight(int m, double sin_theta) {
    if (m == 2) return 1.0 / kPi;
    const double b2 = 4.0 * (m - 1);
    const double s2 = sin_theta * sin_theta;
    return m * b2 * s2 / (2.0 * kPi * ((m - 2.0) * (m - 2.0) + b2 * s2));
}

double km_integrate(int m, const std::function<double(double)>& f) {
    const Grid theta{0.0, kPi, kQuadPoints};
    const auto qw = quadrature_weights(theta);
    const double b = 2.0 * std::sqrt(double(m - 1));
    double total = 0.0;
    for (int i = 0; i < theta.n; ++i) {
        const double t = theta.x(i);
        total += qw[i] * km_weight(m, std::sin(t)) * f(b * std::cos(t));
    }
    return total;
}

}  // namespace

std::string to_string(LinearRegime regime) {
    switch (regime) {
        case LinearRegime::i: return "i";
        case LinearRegime::ii: return "ii";
        case LinearRegime::iii: return "iii";
        case LinearRegime::iv: return "iv";
        case LinearRegime::v: return "v";
    }
    throw std::logic_error("to_string: unknown regime");
}

LinearCaseReport linear_report(int m, double z) {
    require_m(m, "linear_report");
    LinearCaseReport rep;
    rep.m = m;
    rep.z = z;
    rep.regime = LinearRegime::v;

    const double edge = 2.0 * std::sqrt(double(m - 1));
    if (z < edge - kCollar) return rep;
    // At m = 2 the two boundaries collide (edge = m = 2) and the tangent
    // double root is rho = 1, which solves sigma^2 * (z - m*rho) = 1 for no
    // sigma. No Gaussian law exists at or below z = 2.
    if (m == 2 && z <= 2.0 + kCollar) return rep;

    // Inside the tangent collar the discriminant is forced to zero: the last
    // ulp of z² would otherwise leak through the square root as a ~1e−8
    // splitting of what is a genuine double root.
    const bool at_edge = std::abs(z - edge) <= kCollar;
    const double s = at_edge ? 0.0 : std::sqrt(std::max(z * z - 4.0 * (m - 1), 0.0));
    // (z − s)/(2(m−1)) rationalized; avoids the z − s cancellation at large z.
    const double rho_p = 2.0 / (z + s);
    const double rho_m = (z + s) / (2.0 * (m - 1));
    const double threshold = 1.0 / std::sqrt(double(m - 1));
    const auto extendable = [&](double rho) { return std::abs(rho) < threshold - kCollar; };

    rep.rho_plus = rho_p;
    rep.sigma2_plus = 1.0 / (z - m * rho_p);
    rep.extendable_plus = extendable(rho_p);

    if (at_edge) {
        // Tangent point: one double root, and the resolvent does not exist
        // (z sits on the closed spectrum).
        rep.regime = LinearRegime::iv;
        return rep;
    }

    rep.resolvent = 2.0 * (m - 1) / ((m - 2) * z + m * s);
    rep.rho_minus = rho_m;
    if (std::abs(z - m) <= kCollar) {
        rep.regime = LinearRegime::ii;  // rho_m = 1 here, carrying no law
        return rep;
    }
    if (z > m) {
        rep.regime = LinearRegime::i;  // rho_m > 1 here, carrying no law
        return rep;
    }
    rep.regime = LinearRegime::iii;
    rep.sigma2_minus = 1.0 / (z - m * rho_m);
    rep.extendable_minus = extendable(rho_m);
    return rep;
}

double resolvent(int m, double z) {
    require_m(m, "resolvent");
    const double edge = 2.0 * std::sqrt(double(m - 1));
    if (!(z > edge)) {
        if (z >= -edge)
            throw std::domain_error("resolvent: z in spectrum [-2*sqrt(m-1), 2*sqrt(m-1)]");
        throw std::domain_error("resolvent: defined for z above the spectral edge 2*sqrt(m-1)");
    }
    const double s = std::sqrt(z * z - 4.0 * (m - 1));
    return 2.0 * (m - 1) / ((m - 2) * z + m * s);
}

double kesten_mckay_density(int m, double x) {
    require_m(m, "kesten_mckay_density");
    const double supp = 4.0 * (m - 1) - x * x;
    if (supp <= 0.0) return 0.0;
    return m * std::sqrt(supp) / (2.0 * kPi * (double(m) * m - x * x));
}

double kesten_mckay_moment(int m, int k) {
    require_m(m, "kesten_mckay_moment");
    if (k < 0) throw std::invalid_argument("kesten_mckay_moment: order must be nonnegative");
    return km_integrate(m, [k](double x) { return std::pow(x, k); });
}

double kesten_mckay_mass(int m) {
    require_m(m, "kesten_mckay_mass");
    return km_integrate(m, [](double) { return 1.0; });
}

KestenMcKayCurve kesten_mckay_curve(int m, int points) {
    require_m(m, "kesten_mckay_curve");
    if (points < 2) throw std::invalid_argument("kesten_mckay_curve: need at least 2 points");
    const Grid theta{0.0, kPi, points};
    const auto qw = quadrature_weights(theta);
    const double b = 2.0 * std::sqrt(double(m - 1));
    KestenMcKayCurve curve;
    curve.x.resize(points);
    curve.density.resize(points);
    curve.mass.resize(points);
    for (int i = 0; i < points; ++i) {
        // theta descends as x ascends; emit rows in ascending x
        const int j = points - 1 - i;
        const double t = theta.x(j);
        curve.x[i] = b * std::cos(t);
        curve.density[i] = kesten_mckay_density(m, curve.x[i]);
        curve.mass[i] = qw[j] * km_weight(m, std::sin(t));
    }
    return curve;
}

StieltjesCheck stieltjes_check(int m, double z) {
    StieltjesCheck out;
    out.rhs = resolvent(m, z);  // also rejects z at or inside the spectrum
    out.lhs = km_integrate(m, [z](double x) { return 1.0 / (z - x); });
    out.err = std::abs(out.lhs - out.rhs);
    return out;
}

std::vector<double> dyson_polynomial(int m, const std::vector<double>& moments) {
    require_m(m, "dyson_polynomial");
    if (moments.size() != std::size_t(2 * m + 1))
        throw std::invalid_argument("dyson_polynomial: need moments s_0..s_{2m}");

    std::vector<double> binom(m + 1, 1.0);  // Pascal row C(m, j)
    for (int j = 1; j <= m; ++j) binom[j] = binom[j - 1] * double(m - j + 1) / double(j);

    std::vector<double> coeffs(m + 1);
    for (int j = 0; j <= m; ++j)
        coeffs[j] = (double(m - 2 * j) / m) * binom[j] * moments[2 * j];

    int changes = 0;
    double prev = 0.0;
    for (double c : coeffs) {
        if (c == 0.0) continue;  // the j = m/2 coefficient vanishes for even m
        if (prev != 0.0 && std::signbit(c) != std::signbit(prev)) ++changes;
        prev = c;
    }
    if (changes != 1) throw std::runtime_error("polynomial sign pattern violated");
    return coeffs;
}

DysonReport dyson_report(const ModelConfig& cfg) {
    if (cfg.potentials.K.kind != PotentialKind::log_repulsive)
        throw std::invalid_argument("dyson_report: interaction must be the log-repulsive kind");
    const int m = cfg.m;
    require_m(m, "dyson_report");

    const GridFunction density =
        tabulate(cfg.grid, [&](double x) { return std::exp(-cfg.potentials.U(x)); });

    DysonReport rep;
    rep.m = m;
    rep.moments = moments(density, 2 * m);
    rep.poly_coeffs = dyson_polynomial(m, rep.moments);

    // p(0) = −s_{2m} < 0 and p is positive beyond the Cauchy bound, so the
    // bracket always straddles the unique positive root.
    double bound = 0.0;
    for (int j = 1; j <= m; ++j)
        bound = std::max(bound, std::abs(rep.poly_coeffs[j] / rep.poly_coeffs[0]));
    rep.r = find_root_bracketed([&](double t) { return poly_eval(rep.poly_coeffs, t); }, 0.0,
                                1.0 + bound, 1e-13);

    rep.lambda = integrate(tabulate(cfg.grid, [&](double y) {
        return std::pow(y * y + rep.r, m - 1) * std::exp(-cfg.potentials.U(y));
    }));
    return rep;
}

}  // namespace treelaw
