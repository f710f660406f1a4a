#include "treelaw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace treelaw {

std::vector<double> quadrature_weights(const Grid& g) {
    g.validate();
    const size_t n = static_cast<size_t>(g.n);
    const double h = g.step();
    std::vector<double> w(n);
    if (g.n % 2 == 1) {
        // composite Simpson: h/3 * (1, 4, 2, 4, ..., 2, 4, 1)
        w.front() = w.back() = h / 3.0;
        for (size_t i = 1; i + 1 < n; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    } else {
        // trapezoid fallback for even node counts
        w.front() = w.back() = 0.5 * h;
        for (size_t i = 1; i + 1 < n; ++i) w[i] = h;
    }
    return w;
}

double integrate(const Grid& g, const std::vector<double>& values) {
    if (values.size() != static_cast<size_t>(g.n))
        throw std::invalid_argument("integrate: value count does not match grid");
    const auto w = quadrature_weights(g);
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw std::invalid_argument("integrate: non-finite integrand");
        acc += w[i] * values[i];
    }
    return acc;
}

double integrate(const GridFunction& f) { return integrate(f.grid, f.values); }

namespace {

// Iterative radix-2 complex FFT, in place. Size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * 3.141592653589793238462643383280 / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

// Linear convolution c[k] = sum_i a[i] b[k-i] via zero-padded cyclic FFT.
std::vector<double> linear_convolution_fft(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t need = a.size() + b.size() - 1;
    size_t n = 1;
    while (n < need) n <<= 1;
    std::vector<std::complex<double>> fa(n), fb(n);
    for (size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);
    std::vector<double> out(need);
    for (size_t i = 0; i < need; ++i) out[i] = fa[i].real();
    return out;
}

}  // namespace

GridFunction convolve_weight_tabulated(const GridFunction& g, const std::vector<double>& kernel_diff,
                                       ConvolvePath path) {
    const int n = g.grid.n;
    if (kernel_diff.size() != static_cast<size_t>(2 * n - 1))
        throw std::invalid_argument("convolve: kernel table must have 2n-1 entries");
    for (double k : kernel_diff)
        if (!std::isfinite(k)) throw std::invalid_argument("convolve: non-finite kernel value");
    const auto w = quadrature_weights(g.grid);
    std::vector<double> wg(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = g[j];
        if (!std::isfinite(v)) throw std::invalid_argument("convolve: non-finite integrand");
        wg[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] * v;
    }

    GridFunction out(g.grid);
    if (path == ConvolvePath::direct) {
        // h_i = sum_j kernel[(i - j) + n - 1] * w_j g_j, fixed summation order
        for (int i = 0; i < n; ++i) {
            const double* krow = kernel_diff.data() + (i + n - 1);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += krow[-j] * wg[static_cast<size_t>(j)];
            out[i] = acc;
        }
    } else {
        // h_i = (kernel * wg)[i + n - 1] as a linear convolution
        const auto full = linear_convolution_fft(kernel_diff, wg);
        for (int i = 0; i < n; ++i) out[i] = full[static_cast<size_t>(i + n - 1)];
    }
    return out;
}

GridFunction convolve_weight(const GridFunction& g, const std::function<double(double)>& w,
                             ConvolvePath path) {
    const int n = g.grid.n;
    const double h = g.grid.step();
    std::vector<double> kernel(static_cast<size_t>(2 * n - 1));
    for (int d = -(n - 1); d <= n - 1; ++d)
        kernel[static_cast<size_t>(d + n - 1)] = w(static_cast<double>(d) * h);
    return convolve_weight_tabulated(g, kernel, path);
}

std::vector<double> moments(const GridFunction& g, int order) {
    if (order < 0) throw std::invalid_argument("moments: order must be nonnegative");
    const auto w = quadrature_weights(g.grid);
    std::vector<double> m(static_cast<size_t>(order) + 1, 0.0);
    for (int j = 0; j < g.grid.n; ++j) {
        const double v = g[j];
        if (!std::isfinite(v)) throw std::invalid_argument("moments: non-finite integrand");
        const double y = g.grid.x(j);
        double p = w[static_cast<size_t>(j)] * v;
        for (int k = 0; k <= order; ++k) {
            m[static_cast<size_t>(k)] += p;
            p *= y;
        }
    }
    return m;
}

GridFunction convolve_square_kernel(const GridFunction& g) {
    const auto m = moments(g, 2);
    GridFunction out(g.grid);
    for (int i = 0; i < g.grid.n; ++i) {
        const double x = g.grid.x(i);
        out[i] = x * x * m[0] - 2.0 * x * m[1] + m[2];
    }
    return out;
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double xtol, int max_iter) {
    if (!(hi > lo)) throw std::invalid_argument("find_root_bracketed: needs hi > lo");
    double flo = f(lo), fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw std::invalid_argument("find_root_bracketed: non-finite endpoint value");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("find_root_bracketed: no sign change in bracket");
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double poly_eval(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

DensitySampler::DensitySampler(GridFunction density) : density_(std::move(density)) {
    const int n = density_.grid.n;
    const double h = density_.grid.step();
    cum_.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = density_[i];
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("density must be nonnegative and finite");
        if (i > 0) cum_[static_cast<size_t>(i)] =
            cum_[static_cast<size_t>(i - 1)] + 0.5 * h * (density_[i - 1] + density_[i]);
    }
    const double total = cum_.back();
    if (!(total > 0.0)) throw std::invalid_argument("density has no mass on the grid");
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("density must integrate to 1 within 1e-6 (got " +
                                    std::to_string(total) + ")");
    for (auto& c : cum_) c /= total;
}

double DensitySampler::cdf(double x) const {
    const Grid& g = density_.grid;
    if (x <= g.lo) return 0.0;
    if (x >= g.hi) return 1.0;
    const double h = g.step();
    const double fi = (x - g.lo) / h;
    int i = static_cast<int>(std::floor(fi));
    if (i > g.n - 2) i = g.n - 2;
    const double t = fi - static_cast<double>(i);
    const size_t k = static_cast<size_t>(i);
    return cum_[k] + t * (cum_[k + 1] - cum_[k]);
}

double DensitySampler::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile argument must be in (0,1)");
    const Grid& g = density_.grid;
    // first segment whose upper cumulative reaches u
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    size_t k = static_cast<size_t>(it - cum_.begin());
    if (k == 0) k = 1;
    if (k > static_cast<size_t>(g.n - 1)) k = static_cast<size_t>(g.n - 1);
    const double c0 = cum_[k - 1], c1 = cum_[k];
    const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return g.x(static_cast<int>(k - 1)) + t * g.step();
}

double inverse_cdf_sample(const GridFunction& density, double u) {
    return DensitySampler(density).quantile(u);
}

}  // namespace treelaw
