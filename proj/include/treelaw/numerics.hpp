#pragma once

/**
 * Quadrature, weighted convolution, bracketed root finding and inverse-CDF
 * sampling on uniform grids.
 *
 * Conventions, fixed once so every module agrees bit for bit:
 *  - integrate() uses composite Simpson when the node count is odd (the
 *    default grids are), composite trapezoid otherwise;
 *  - convolve_weight() evaluates h(x_i) = ∫ w(x_i − y) g(y) dy with the same
 *    quadrature weights. The kernel is translation-invariant on a uniform
 *    grid, so it is tabulated once over the 2n−1 node differences and applied
 *    as a Toeplitz mat-vec (direct path). An FFT path gives the same numbers
 *    to ~1e−13 of the sup norm and can be selected for large grids;
 *  - find_root_bracketed() is pure bisection: no derivatives, no surprises;
 *  - inverse_cdf_sample() inverts the piecewise-linear CDF of a tabulated
 *    density, which is the single sampling primitive everything else
 *    (tree sampler, particle initialisation) is built on.
 */

#include <functional>
#include <vector>

#include "treelaw/grid.hpp"

namespace treelaw {

/// Quadrature node weights (Simpson for odd n, trapezoid for even n), step included.
std::vector<double> quadrature_weights(const Grid& g);

double integrate(const Grid& g, const std::vector<double>& values);
double integrate(const GridFunction& f);

enum class ConvolvePath { direct, fft };

/// h(x_i) = ∫ w(x_i − y) g(y) dy on g's grid.
GridFunction convolve_weight(const GridFunction& g, const std::function<double(double)>& w,
                             ConvolvePath path = ConvolvePath::direct);

/// Same contract with the kernel already tabulated on node differences:
/// kernel_diff[d + n − 1] = w(d * step), d = −(n−1) .. n−1.
GridFunction convolve_weight_tabulated(const GridFunction& g, const std::vector<double>& kernel_diff,
                                       ConvolvePath path = ConvolvePath::direct);

/// Exact path for the square kernel w(u) = u²:
/// ∫ (x−y)² g(y) dy = x² M₀ − 2x M₁ + M₂ with M_k the k-th moment of g.
/// This is how the log-repulsive interaction weight e^{−K} = (x−y)^β, β = 2,
/// is integrated without ever evaluating log|x−y| near the diagonal.
GridFunction convolve_square_kernel(const GridFunction& g);

/// Raw moments ∫ y^k g(y) dy for k = 0..order.
std::vector<double> moments(const GridFunction& g, int order);

/// Bisection on [lo, hi]; requires a sign change, returns the midpoint of the
/// final bracket once its width is below xtol.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double xtol = 1e-12, int max_iter = 200);

/// Horner evaluation, coefficients in descending degree order.
double poly_eval(const std::vector<double>& coeffs, double x);

/// Single-shot inverse-CDF draw from a tabulated density (u in (0,1)).
/// The density must be nonnegative and integrate to 1 within 1e−6.
double inverse_cdf_sample(const GridFunction& density, double u);

/// Cached piecewise-linear CDF of a tabulated density, for repeated draws.
class DensitySampler {
  public:
    explicit DensitySampler(GridFunction density);
    double quantile(double u) const;    ///< inverse CDF, u in (0,1)
    double cdf(double x) const;         ///< piecewise-linear CDF
    const GridFunction& density() const { return density_; }

  private:
    GridFunction density_;
    std::vector<double> cum_;  // cum_[i] = ∫_{lo}^{x_i}, trapezoid, normalised to cum_.back() = 1
};

}  // namespace treelaw
