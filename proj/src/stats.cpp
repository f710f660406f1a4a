#include "treelaw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treelaw/numerics.hpp"

namespace treelaw {

double ks_statistic(std::vector<double> sample, const GridFunction& density) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    const DensitySampler ref(density);
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double c = ref.cdf(sample[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {  // tie: both CDFs jump at the same point
            const double t = a[i];
            while (i < a.size() && a[i] == t) ++i;
            while (j < b.size() && b[j] == t) ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_two_sample_2d(const std::vector<std::pair<double, double>>& a,
                        const std::vector<std::pair<double, double>>& b, int bins) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample_2d: empty sample");
    if (bins < 2) throw std::invalid_argument("ks_two_sample_2d: bins must be >= 2");

    double xlo = a[0].first, xhi = a[0].first, ylo = a[0].second, yhi = a[0].second;
    for (const auto* set : {&a, &b}) {
        for (const auto& p : *set) {
            xlo = std::min(xlo, p.first);
            xhi = std::max(xhi, p.first);
            ylo = std::min(ylo, p.second);
            yhi = std::max(yhi, p.second);
        }
    }
    const double wx = (xhi > xlo) ? (xhi - xlo) : 1.0;
    const double wy = (yhi > ylo) ? (yhi - ylo) : 1.0;

    const std::size_t nb2 = static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins);
    std::vector<long long> ca(nb2, 0), cb(nb2, 0);
    auto bin_of = [&](double v, double lo, double w) {
        int k = static_cast<int>((v - lo) / w * bins);
        return std::clamp(k, 0, bins - 1);
    };
    for (const auto& p : a) ++ca[static_cast<std::size_t>(bin_of(p.first, xlo, wx)) * bins + bin_of(p.second, ylo, wy)];
    for (const auto& p : b) ++cb[static_cast<std::size_t>(bin_of(p.first, xlo, wx)) * bins + bin_of(p.second, ylo, wy)];

    // joint prefix sums P(i,j) = #{bx ≤ i, by ≤ j}; the four quadrant counts
    // at a split point all follow from P and the marginals.
    auto prefix = [&](std::vector<long long>& c) {
        for (int i = 0; i < bins; ++i)
            for (int j = 1; j < bins; ++j) c[static_cast<std::size_t>(i) * bins + j] += c[static_cast<std::size_t>(i) * bins + j - 1];
        for (int i = 1; i < bins; ++i)
            for (int j = 0; j < bins; ++j) c[static_cast<std::size_t>(i) * bins + j] += c[static_cast<std::size_t>(i - 1) * bins + j];
    };
    prefix(ca);
    prefix(cb);

    const double na = static_cast<double>(a.size());
    const double nbp = static_cast<double>(b.size());
    const long long ta = static_cast<long long>(a.size());
    const long long tb = static_cast<long long>(b.size());
    double d = 0.0;
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            const std::size_t ij = static_cast<std::size_t>(i) * bins + j;
            const long long pa = ca[ij], pb = cb[ij];
            const long long xa = ca[static_cast<std::size_t>(i) * bins + (bins - 1)];
            const long long xb = cb[static_cast<std::size_t>(i) * bins + (bins - 1)];
            const long long ya = ca[static_cast<std::size_t>(bins - 1) * bins + j];
            const long long yb = cb[static_cast<std::size_t>(bins - 1) * bins + j];
            const long long qa[4] = {pa, xa - pa, ya - pa, ta - xa - ya + pa};
            const long long qb[4] = {pb, xb - pb, yb - pb, tb - xb - yb + pb};
            for (int q = 0; q < 4; ++q)
                d = std::max(d, std::abs(static_cast<double>(qa[q]) / na -
                                         static_cast<double>(qb[q]) / nbp));
        }
    }
    return d;
}

namespace {

// Pairwise (cascade) summation: error O(log n) in ulps instead of O(n), and a
// fixed association tree so a given input order always produces the same bits.
double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_mean(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

}  // namespace

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    return pairwise_mean(v);
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need at least two values");
    const double mu = pairwise_mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
    return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(v.size() - 1);
}

CorrelationEstimate correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("correlation: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("correlation: need at least three pairs");
    const std::size_t n = x.size();
    const double mx = pairwise_mean(x);
    const double my = pairwise_mean(y);

    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        xx[i] = dx * dx;
        yy[i] = dy * dy;
        xy[i] = dx * dy;
    }
    const double sxx = pairwise_sum(xx.data(), n);
    const double syy = pairwise_sum(yy.data(), n);
    const double sxy = pairwise_sum(xy.data(), n);
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw std::invalid_argument("correlation: degenerate (constant) sample");

    CorrelationEstimate est;
    est.value = sxy / std::sqrt(sxx * syy);

    // Influence function of the correlation coefficient,
    //   ψ_i = x̃ᵢỹᵢ/(σₓσᵧ) − (r/2)(x̃ᵢ²/σₓ² + ỹᵢ²/σᵧ²),
    // whose sample standard deviation over √n estimates the SE without a
    // Gaussianity assumption (it reduces to (1−r²)/√n in the Gaussian case).
    const double vx = sxx / static_cast<double>(n);
    const double vy = syy / static_cast<double>(n);
    const double sxsy = std::sqrt(vx * vy);
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i)
        psi[i] = xy[i] / sxsy - 0.5 * est.value * (xx[i] / vx + yy[i] / vy);
    const double pm = pairwise_mean(psi);
    std::vector<double> ps2(n);
    for (std::size_t i = 0; i < n; ++i) ps2[i] = (psi[i] - pm) * (psi[i] - pm);
    const double vpsi = pairwise_sum(ps2.data(), n) / static_cast<double>(n - 1);
    est.se = std::sqrt(vpsi / static_cast<double>(n));
    return est;
}

double partial_correlation(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z) {
    const double rxz = correlation(x, z).value;
    const double rxy = correlation(x, y).value;
    const double ryz = correlation(y, z).value;
    const double denom = std::sqrt((1.0 - rxy * rxy) * (1.0 - ryz * ryz));
    if (!(denom > 0.0)) throw std::invalid_argument("partial_correlation: degenerate conditioning");
    return (rxz - rxy * ryz) / denom;
}

}  // namespace treelaw
