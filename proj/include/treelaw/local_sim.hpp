#pragma once

/**
 * Particle simulation of the two-vertex local dynamics.
 *
 * An ensemble of edge pairs (X_i, Y_i) evolves by Euler-Maruyama steps of
 *
 *     dX = −( U′(X) + K′(X−Y) + (m−1)·g(X) ) dt + √2 dB,
 *
 * and symmetrically in Y. The closure function g is either F′ read off a
 * solved fixed point (decoupled mode) or a kernel-regression estimate of
 * E[K′(X−Y) | X] over the current ensemble (estimated mode). In the decoupled
 * mode the dynamics is the Langevin diffusion of the two-vertex density, so an
 * ensemble initialized from that law should stay in it; this is the module's
 * main statistical check.
 *
 * Noise is generated by a counter-based normal field keyed on one fresh
 * 64-bit draw per step plus the particle's own and partner values, so a step
 * is a pure function of (ensemble, one rng draw). Two exact invariants follow:
 * permuting particles commutes with stepping, and swapping the X and Y arrays
 * commutes with stepping, both to bitwise equality. Because every key
 * contains the fresh per-step draw and particle values are a.s. pairwise
 * distinct, the increments are still i.i.d. standard normals conditionally on
 * the current state.
 */

#include <vector>

#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/potentials.hpp"
#include "treelaw/rng.hpp"

namespace treelaw {

enum class DriftMode { decoupled, estimated };

std::string to_string(DriftMode mode);

struct ParticleEnsemble {
    std::vector<double> X;
    std::vector<double> Y;
    double time = 0.0;
    DriftMode mode = DriftMode::decoupled;
    double bandwidth = 0.0;  ///< kernel-regression bandwidth (estimated mode)

    int size() const { return static_cast<int>(X.size()); }
};

/// I.i.d. pairs from the edge law by two-stage inverse CDF (marginal, then
/// parent→child conditional). In estimated mode the bandwidth is set to the
/// Silverman-type default n^{−1/5}·std(X) unless a positive override is given.
ParticleEnsemble init_from_edge_law(const EdgeLaw& law, int n, DriftMode mode, Rng& rng,
                                    double bandwidth = 0.0);

/**
 * Nadaraya-Watson estimate of g(x) = E[K′(X−Y) | X = x], tabulated on the
 * model grid. The regression pools both coordinates of every pair (the edge
 * law is exchangeable, and this is what makes the estimated dynamics exactly
 * symmetric under the X↔Y swap). Sample weights are accumulated into binned
 * fixed-point sums, so the result is bitwise independent of particle order.
 * Nodes with no kernel mass carry g = 0.
 */
GridFunction conditional_drift_estimate(const ModelConfig& cfg, const std::vector<double>& X,
                                        const std::vector<double>& Y, double bandwidth);

/// One Euler-Maruyama step. sol is required in decoupled mode and ignored in
/// estimated mode. The log-repulsive interaction clips |X−Y| below at 1e−4
/// before evaluating K′ so a step crossing the singularity stays bounded.
ParticleEnsemble step_local(const ModelConfig& cfg, const ParticleEnsemble& ens,
                            const FixedPointSolution* sol, double dt, Rng& rng);

struct StationarityReport {
    double ks_marginal = 0.0;  ///< KS of the final X sample against the law's marginal
    double symmetry_ks = 0.0;  ///< 2-D two-sample KS between final (X,Y) and (Y,X)
};

/// Initializes n pairs from the law, evolves them to t_end and reports how
/// well the final ensemble still matches the law and its exchange symmetry.
StationarityReport run_stationarity_test(const ModelConfig& cfg, const FixedPointSolution& sol,
                                         const EdgeLaw& law, int n, double dt, double t_end,
                                         DriftMode mode, Rng& rng);

struct TrajectoryPoint {
    double time = 0.0;
    double mean_x = 0.0;
    double var_x = 0.0;
    double cov_xy = 0.0;
    double ks_marginal = 0.0;  ///< KS of the current X sample against law.rho_X
};

/// Advances ens in place to t_end, recording the initial state plus
/// `checkpoints` evenly spaced summary rows (the last one at t_end). The law
/// only serves as the KS reference; the caller chooses the initial ensemble,
/// so relaxation from a deliberately wrong law is observable.
std::vector<TrajectoryPoint> run_local_trajectory(const ModelConfig& cfg, ParticleEnsemble& ens,
                                                  const FixedPointSolution* sol,
                                                  const EdgeLaw& law, double dt, double t_end,
                                                  int checkpoints, Rng& rng);

}  // namespace treelaw
