#pragma once

/**
 * Sample statistics used by the verification layers: Kolmogorov-Smirnov
 * distances (one-sample against a tabulated density, two-sample in one and
 * two dimensions), Pearson correlation with an influence-function standard
 * error, and the Gaussian-proxy partial correlation.
 */

#include <utility>
#include <vector>

#include "treelaw/grid.hpp"

namespace treelaw {

/// KS distance between an i.i.d. sample and a density tabulated on a grid
/// (reference CDF is the piecewise-linear cumulative of the density).
double ks_statistic(std::vector<double> sample, const GridFunction& density);

/// Two-sample KS distance in one dimension.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Two-sample KS distance in two dimensions: both point sets are binned on a
/// shared bins×bins lattice and the empirical-CDF difference is maximised
/// over all four quadrant orientations. Binning can only lower the supremum,
/// so the statistic is conservative for equal-law (null) comparisons.
double ks_two_sample_2d(const std::vector<std::pair<double, double>>& a,
                        const std::vector<std::pair<double, double>>& b, int bins = 512);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  ///< with the 1/(n−1) factor

struct CorrelationEstimate {
    double value = 0.0;
    double se = 0.0;  ///< influence-function (delta method) standard error
};

CorrelationEstimate correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Partial correlation of (x, z) given y through the three pairwise Pearson
/// coefficients. Exact conditional-independence test for jointly Gaussian
/// triples, a proxy otherwise.
double partial_correlation(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z);

}  // namespace treelaw
