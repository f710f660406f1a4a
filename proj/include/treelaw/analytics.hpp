#pragma once

/*
 * analytics: closed-form reference results for the two exactly solvable
 * models, used both as user-facing reports and as oracles for the solver.
 *
 *  - The linear model (quadratic U and K) reduces to a quadratic equation for
 *    the edge correlation ρ together with σ²(z − mρ) = 1 for the variance.
 *    linear_report() classifies the coupling z into the five regimes and
 *    fills whichever branch quantities exist there.
 *  - The same model computes the diagonal resolvent of the adjacency operator
 *    of the m-regular tree, whose spectral measure is the Kesten-McKay law;
 *    kesten_mckay_* and stieltjes_check() cross-check the two routes.
 *  - The log-repulsive (β = 2) model admits F(x) = −log(x² + r) where r is
 *    the unique positive root of a moment polynomial; dyson_report() builds
 *    the polynomial from quadrature moments of e^{−U} and bisects the root.
 */

#include <optional>
#include <string>
#include <vector>

#include "treelaw/grid.hpp"
#include "treelaw/potentials.hpp"

namespace treelaw {

/// Regimes of the linear model at fixed m, ordered by decreasing coupling z:
///   i    z > m               one Gaussian law (the + branch)
///   ii   z = m, m > 2        one Gaussian law, ρ = 1/(m−1)
///   iii  2√(m−1) < z < m     two Gaussian laws (+ and − branches)
///   iv   z = 2√(m−1), m > 2  one tangent solution, ρ = 1/√(m−1)
///   v    z < 2√(m−1)         none (also z = m = 2, where iv and ii collide)
enum class LinearRegime { i, ii, iii, iv, v };

std::string to_string(LinearRegime regime);

/// Everything that is known in closed form about the linear model at (m, z).
/// Absent fields do not exist in that regime. The minus-branch correlation is
/// reported in regimes i and ii as well (the quadratic always has two real
/// roots there) but without a variance: z − mρ₋ ≤ 0, so no Gaussian law goes
/// with that root.
struct LinearCaseReport {
    int m = 0;
    double z = 0.0;
    LinearRegime regime = LinearRegime::v;
    std::optional<double> sigma2_plus;
    std::optional<double> sigma2_minus;
    std::optional<double> rho_plus;
    std::optional<double> rho_minus;
    std::optional<double> resolvent;      ///< only for z strictly above the spectral edge
    std::optional<bool> extendable_plus;  ///< |ρ| < 1/√(m−1), the ℓ₂ threshold
    std::optional<bool> extendable_minus;
};

/// Regime boundaries z = m and z = 2√(m−1) are decided with a 1e−12 collar.
LinearCaseReport linear_report(int m, double z);

/// Diagonal resolvent ⟨e_v, (zI − A)⁻¹ e_v⟩ of the m-regular tree adjacency,
/// 2(m−1)/((m−2)z + m√(z² − 4(m−1))). For z > m this equals σ²₊ exactly.
/// Throws for z inside the spectrum [−2√(m−1), 2√(m−1)] or below it.
double resolvent(int m, double z);

/// Spectral density m·√((4(m−1) − x²)₊)/(2π(m² − x²)); zero outside the
/// closed support (including its endpoints, where the m = 2 case diverges).
double kesten_mckay_density(int m, double x);

/// ∫ x^k μ(dx) over the spectral measure; mass is the k = 0 case and should
/// come out as 1, the second moment as m (closed two-step walks per vertex).
double kesten_mckay_moment(int m, int k);
double kesten_mckay_mass(int m);

/// Density curve sampled along the cosine substitution x = 2√(m−1)·cos θ,
/// with per-row quadrature masses that sum to kesten_mckay_mass(m). Rows are
/// ascending in x. This is the plotting/CSV payload.
struct KestenMcKayCurve {
    std::vector<double> x;
    std::vector<double> density;
    std::vector<double> mass;
};
KestenMcKayCurve kesten_mckay_curve(int m, int points = 2001);

/// lhs = ∫ (z−x)⁻¹ μ(dx) by quadrature, rhs = resolvent(m, z), err = |lhs−rhs|.
struct StieltjesCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double err = 0.0;
};
StieltjesCheck stieltjes_check(int m, double z);

/// Moment polynomial of the log-repulsive model in descending powers:
/// coefficient of r^{m−j} is ((m−2j)/m)·C(m,j)·s_{2j}, j = 0..m, from the
/// confinement moments s_k = ∫ x^k e^{−U(x)} dx. Since every s_{2j} > 0 the
/// signs run +..+(0)−..− with exactly one change, so a unique positive root;
/// any other pattern means the supplied moments are broken and throws.
std::vector<double> dyson_polynomial(int m, const std::vector<double>& moments);

struct DysonReport {
    int m = 0;
    std::vector<double> moments;      ///< s_0 .. s_{2m}
    std::vector<double> poly_coeffs;  ///< descending powers r^m .. r^0
    double r = 0.0;                   ///< unique positive root
    double lambda = 0.0;              ///< ∫ (y² + r)^{m−1} e^{−U(y)} dy
};

/// Requires the log-repulsive interaction kind. Moments come from quadrature
/// on cfg.grid; a violated sign pattern means the moments are garbage and is
/// reported as an error rather than bisected into nonsense.
DysonReport dyson_report(const ModelConfig& cfg);

}  // namespace treelaw
