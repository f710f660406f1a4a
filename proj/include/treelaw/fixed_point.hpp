#pragma once

/**
 * The fixed-point problem for stationary homogeneous Markov laws.
 *
 * A solution is a function F and constant C with
 *
 *     F(x) = C − log ∫ exp(−U(y) − K(x−y) − (m−1) F(y)) dy ,
 *
 * determined up to an additive shift of F; everything here works with the
 * gauge F(0) = 0. The map
 *
 *     T(F)(x) = log ∫ e^{−U−K(y)−(m−1)F} dy − log ∫ e^{−U−K(x−y)−(m−1)F} dy
 *
 * is the gauged one-step update (T(F)(0) = 0 for even K by construction);
 * its fixed points are exactly the gauged solutions, with C recovered as the
 * first of the two log-masses. Integrands are max-exponent shifted before
 * exponentiation, and the log-repulsive interaction runs through the exact
 * second-moment expansion of the weight (x−y)².
 *
 * Solvers: damped Picard iteration on T for any m, and for m = 2 a power
 * iteration on the positive kernel S φ(x) = ∫ φ(y) e^{−K(x−y)−U(y)} dy with
 * F = −log φ, C = log Λ (Λ the dominant eigenvalue); both return the same
 * gauged representative.
 */

#include <optional>
#include <string>

#include "treelaw/numerics.hpp"
#include "treelaw/potentials.hpp"

namespace treelaw {

struct FixedPointSolution {
    GridFunction F;             ///< gauged, F(0) = 0
    double C = 0.0;             ///< log ∫ e^{−U−K(y)−(m−1)F} (gauged constant; e^C is the m=2 eigenvalue)
    double residual = 0.0;      ///< sup |T(F) − F|
    int iterations = 0;
    double integrability = 0.0; ///< ∫ e^{−U−mF} on the grid
    bool converged = false;
    /// max of e^{−U−mF} at the two boundary nodes over its max on the grid;
    /// values that are not ≪ 1 mean the law is not confined by the grid and
    /// the "solution" is a truncation artifact.
    double boundary_mass_ratio = 0.0;
};

struct TApplication {
    GridFunction T;
    double C;  ///< log ∫ e^{−U−K(y)−(m−1)F} dy
};

// The map always runs the direct O(n²) convolution: its integral is consumed
// in log scale, where far-tail values many orders below the peak still carry
// information. A positive-term direct sum keeps them to full relative
// accuracy; an FFT's absolute noise floor (~1e−16 of peak) would turn those
// logs into garbage. The FFT path stays available in the numerics layer for
// density-scale convolutions, where sup-norm accuracy is the right contract.
TApplication apply_T_full(const ModelConfig& cfg, const GridFunction& F);
GridFunction apply_T(const ModelConfig& cfg, const GridFunction& F);

struct PicardOptions {
    double damping = 0.5;  ///< F ← (1−α)F + α T(F)
    double tol = 1e-8;     ///< on sup |ΔF| per iteration
    int max_iter = 500;
    std::optional<GridFunction> init;  ///< default: F ≡ 0
};

FixedPointSolution solve_picard(const ModelConfig& cfg, const PicardOptions& opts = {});

struct PowerOptions {
    double tol = 1e-10;  ///< on sup |Δφ| of the sup-normalised iterate
    int max_iter = 2000;
};

/// m = 2 only: positive-kernel power iteration; errors for m ≠ 2.
FixedPointSolution solve_power_m2(const ModelConfig& cfg, const PowerOptions& opts = {});

/// Wrap a closed-form F (gauged internally) as a solution record: C, residual,
/// integrability are computed through apply_T. Lets exact formulas flow into
/// the edge-law/sampling layers exactly like solver output.
FixedPointSolution solution_from_closed_form(const ModelConfig& cfg,
                                             const std::function<double(double)>& F);

struct BandCheck {
    bool applicable = false;  ///< curvature bounds present
    bool in_band = false;     ///< second differences of F within [d, c] up to slack
    double f2_min = 0.0;
    double f2_max = 0.0;
    double band_lo = 0.0;  ///< d = b − c/(m−1)
    double band_hi = 0.0;  ///< c
};

/// Diagnostic only: locates the numerical second difference of the solved F
/// relative to the invariant curvature band [b − c/(m−1), c].
BandCheck band_check(const ModelConfig& cfg, const FixedPointSolution& sol, double slack = 1e-3);

}  // namespace treelaw
