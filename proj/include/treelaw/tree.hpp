#pragma once

/*
 * tree: the radius-k ball of the m-regular tree, exact sampling of its Gibbs
 * law from an edge law, and an Euler-Maruyama simulator for the truncated
 * interacting SDE. Leaves of the simulator are "wired": each missing
 * neighbor contributes F′ to the drift, which makes the sampled law exactly
 * stationary for the truncated dynamics instead of an uncontrolled cutoff.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/potentials.hpp"
#include "treelaw/rng.hpp"
#include "treelaw/stats.hpp"

namespace treelaw {

/// Ball of radius `depth` around a root vertex of the m-regular tree.
/// Vertices are addressed by their root path: the root is "", its m children
/// are "0".."m-1", and every deeper vertex has m-1 children appending
/// "0".."m-2". Vertices are stored breadth-first with the root at index 0,
/// so parents always precede children. Addresses use single-digit labels,
/// which caps m at 10 (plenty for any ball that fits in memory).
class TreeBall {
  public:
    TreeBall(int m, int depth);

    int m() const { return m_; }
    int depth() const { return depth_; }
    int size() const { return static_cast<int>(parent_.size()); }

    int parent(int v) const { return parent_[v]; }  ///< -1 at the root
    int depth_of(int v) const { return depth_of_[v]; }
    bool is_leaf(int v) const { return depth_of_[v] == depth_; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    const std::string& address(int v) const { return address_[v]; }

    /// Vertex index for an address, -1 when it is not in the ball.
    int find(const std::string& address) const;

  private:
    int m_ = 0;
    int depth_ = 0;
    std::vector<int> parent_;
    std::vector<int> depth_of_;
    std::vector<std::vector<int>> children_;
    std::vector<std::string> address_;
};

/// One draw from the depth-k Gibbs law, values indexed by ball vertex.
struct TreeSample {
    std::shared_ptr<const TreeBall> ball;
    std::vector<double> values;
};

/// Reusable exact sampler: root from the single-site marginal, then each
/// child from the conditional kernel given its parent, in breadth-first
/// order. The factorized form of the density makes this draw exact, not
/// approximate. Quantile tables are built once here and shared by draws.
class TreeGibbsSampler {
  public:
    TreeGibbsSampler(const EdgeLaw& law, int k);

    const std::shared_ptr<const TreeBall>& ball() const { return ball_; }
    TreeSample draw(Rng& rng) const;

  private:
    std::shared_ptr<const TreeBall> ball_;
    EdgeSampler sampler_;
};

/// One-shot convenience draw. Building the quantile tables dwarfs the cost
/// of a single draw; batches should use TreeGibbsSampler or
/// draw_tree_samples.
TreeSample sample_tree(const EdgeLaw& law, int k, Rng& rng);

/// count independent draws, sample i using the RNG stream (master_seed, i).
/// The result is bitwise identical for every worker partition, so a threaded
/// run reproduces a sequential one.
std::vector<TreeSample> draw_tree_samples(const EdgeLaw& law, int k, int count,
                                          std::uint64_t master_seed, int threads = 1);

struct TreeSdeState {
    std::shared_ptr<const TreeBall> ball;
    std::vector<double> values;
    double time = 0.0;
    std::uint64_t rng_seed = 0;
    long steps = 0;
    bool escaped = false;  ///< some vertex left the grid at some point of the run
};

/// Euler-Maruyama for the interacting SDE on the ball, noise scale √(2·dt).
/// Every vertex keeps its in-ball neighbor interactions; each of its missing
/// neighbors (m−1 of them at a leaf, all m at a depth-0 root) is replaced by
/// the mean-field term F′, with F′ taken as the centered difference of the
/// solved F. Values beyond the grid are flagged "escaped" and the drift is
/// extrapolated linearly rather than aborting the run. Deterministic for a
/// fixed seed.
TreeSdeState simulate_tree_sde(const ModelConfig& cfg, const FixedPointSolution& sol, int k,
                               double dt, double t_end, const TreeSample& init,
                               std::uint64_t seed);

struct MarkovTestResult {
    double partial_corr = 0.0;
    bool pass = false;  ///< |partial_corr| < 0.01
};

/// Partial correlation of (root, grandchild) given the connecting child,
/// along the leftmost path. Zero in exact arithmetic whenever the sampled
/// field is Markov and the triple is Gaussian; a proxy statistic otherwise.
/// Requires depth >= 2 and at least 1e5 samples for the threshold to be
/// meaningful.
MarkovTestResult markov_test(const std::vector<TreeSample>& samples);

/// Pearson correlation between the root value and the value at distance d
/// down the leftmost path, d = 1..max_distance. Pairs come from distinct
/// samples only, so the influence-function standard errors are valid.
std::vector<CorrelationEstimate> correlation_by_distance(const std::vector<TreeSample>& samples,
                                                         int max_distance);

/// 2-D KS statistic between the (root, child) and (child, grandchild) pair
/// clouds on the leftmost path; small exactly when consecutive generations
/// share one edge law.
double homogeneity_statistic(const std::vector<TreeSample>& samples);

}  // namespace treelaw
