#pragma once

/**
 * Uniform 1-D grid and grid-sampled functions.
 *
 * Everything downstream (quadrature, convolution, densities, solvers) works on
 * a fixed uniform grid [lo, hi] with n nodes. Functions are tabulated once and
 * evaluated by linear interpolation; the SDE steppers additionally need linear
 * extrapolation beyond the grid, which is provided separately so that plain
 * evaluation can stay strict about its domain.
 */

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelaw {

struct Grid {
    double lo = -10.0;
    double hi = 10.0;
    int n = 2049;

    double step() const { return (hi - lo) / static_cast<double>(n - 1); }
    double x(int i) const { return lo + step() * static_cast<double>(i); }

    std::vector<double> points() const {
        std::vector<double> p(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = x(i);
        return p;
    }

    bool symmetric() const { return lo == -hi; }

    /// Index of the node exactly at x = 0, or -1 when 0 is not a node.
    int index_of_zero() const {
        if (lo > 0.0 || hi < 0.0) return -1;
        const double fi = -lo / step();
        const int i = static_cast<int>(std::lround(fi));
        if (i < 0 || i >= n) return -1;
        return x(i) == 0.0 ? i : -1;
    }

    void validate() const {
        if (!(std::isfinite(lo) && std::isfinite(hi)))
            throw std::invalid_argument("grid bounds must be finite");
        if (!(hi > lo)) throw std::invalid_argument("grid needs hi > lo");
        if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    }

    bool operator==(const Grid&) const = default;
};

struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid(g), values(static_cast<size_t>(g.n), 0.0) {}
    GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != static_cast<size_t>(g.n))
            throw std::invalid_argument("grid function size mismatch");
    }

    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    int size() const { return grid.n; }

    /// Linear interpolation; throws outside [lo, hi].
    double operator()(double x) const {
        if (!(x >= grid.lo && x <= grid.hi))
            throw std::domain_error("evaluation outside grid [" + std::to_string(grid.lo) +
                                    ", " + std::to_string(grid.hi) + "]: x = " + std::to_string(x));
        return eval_extrapolate(x);
    }

    /// Linear interpolation inside, linear extension of the boundary segments outside.
    double eval_extrapolate(double x) const {
        const double h = grid.step();
        double fi = (x - grid.lo) / h;
        int i = static_cast<int>(std::floor(fi));
        if (i < 0) i = 0;
        if (i > grid.n - 2) i = grid.n - 2;
        const double t = fi - static_cast<double>(i);
        const size_t k = static_cast<size_t>(i);
        return values[k] + t * (values[k + 1] - values[k]);
    }
};

inline GridFunction tabulate(const Grid& g, const std::function<double(double)>& f) {
    GridFunction out(g);
    for (int i = 0; i < g.n; ++i) out[i] = f(g.x(i));
    return out;
}

/// Centered differences inside, one-sided at the two boundary nodes.
inline GridFunction derivative_centered(const GridFunction& f) {
    const int n = f.grid.n;
    const double h = f.grid.step();
    GridFunction d(f.grid);
    d[0] = (f[1] - f[0]) / h;
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    return d;
}

}  // namespace treelaw
