#include <doctest.h>

#include <cmath>

#include "treelaw/numerics.hpp"
#include "treelaw/rng.hpp"

using namespace treelaw;

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kSqrtPi = 1.7724538509055159;
}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("simpson integrates constants exactly") {
    Grid g{0.0, 1.0, 101};
    GridFunction one = tabulate(g, [](double) { return 1.0; });
    CHECK(integrate(one) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("simpson hits the gaussian mass on the default-size grid") {
    Grid g{-10.0, 10.0, 2001};
    GridFunction f = tabulate(g, [](double x) { return std::exp(-0.5 * x * x); });
    CHECK(std::abs(integrate(f) - kSqrt2Pi) < 1e-7);
}

TEST_CASE("odd integrands cancel on symmetric grids") {
    Grid g{-1.0, 1.0, 101};
    GridFunction f = tabulate(g, [](double x) { return x; });
    CHECK(std::abs(integrate(f)) < 1e-12);
}

TEST_CASE("even node counts fall back to trapezoid") {
    Grid g{0.0, 1.0, 100};
    GridFunction f = tabulate(g, [](double x) { return x; });
    CHECK(integrate(f) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("integrate rejects non-finite values") {
    Grid g{0.0, 1.0, 11};
    GridFunction f(g);
    f[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(integrate(f), "integrate: non-finite integrand", std::invalid_argument);
}

TEST_CASE("convolution with a flat kernel returns the total mass everywhere") {
    Grid g{-5.0, 5.0, 257};
    GridFunction f = tabulate(g, [](double x) { return std::exp(-x * x); });
    const double mass = integrate(f);
    GridFunction h = convolve_weight(f, [](double) { return 1.0; });
    for (int i : {0, 64, 128, 200, 256})
        CHECK(h[i] == doctest::Approx(mass).epsilon(1e-13));
}

TEST_CASE("gaussian-kernel convolution matches the closed form") {
    // ∫ e^{−(x−y)²/2} e^{−y²/2} dy = √π e^{−x²/4}
    Grid g{-10.0, 10.0, 2049};
    GridFunction f = tabulate(g, [](double y) { return std::exp(-0.5 * y * y); });
    GridFunction h = convolve_weight(f, [](double u) { return std::exp(-0.5 * u * u); });
    for (int i : {1024, 1075, 896, 1331, 1638}) {  // node values, no interpolation error
        const double x = g.x(i);
        const double expected = kSqrtPi * std::exp(-0.25 * x * x);
        CHECK(std::abs(h[i] - expected) < 1e-6);
    }
}

TEST_CASE("square-kernel path equals the moment expansion identity") {
    // ∫ (x−y)² e^{−y²/2} dy = √2π (x² + 1)
    Grid g{-10.0, 10.0, 2049};
    GridFunction f = tabulate(g, [](double y) { return std::exp(-0.5 * y * y); });
    GridFunction h = convolve_square_kernel(f);
    for (int i : {1024, 1126, 768, 1741}) {
        const double x = g.x(i);
        const double expected = kSqrt2Pi * (x * x + 1.0);
        CHECK(std::abs(h[i] - expected) < 1e-6);
    }
}

TEST_CASE("fft path agrees with the direct path to 1e-10 of the sup norm") {
    Grid g{-10.0, 10.0, 2049};
    GridFunction f = tabulate(g, [](double y) { return std::exp(-0.5 * y * y) * (1.0 + 0.3 * std::sin(2.0 * y)); });
    auto kernel = [](double u) { return std::exp(-0.5 * u * u); };
    GridFunction direct = convolve_weight(f, kernel, ConvolvePath::direct);
    GridFunction fast = convolve_weight(f, kernel, ConvolvePath::fft);
    double sup = 0.0, denom = 0.0;
    for (int i = 0; i < g.n; ++i) {
        sup = std::max(sup, std::abs(direct[i] - fast[i]));
        denom = std::max(denom, std::abs(direct[i]));
    }
    CHECK(sup < 1e-10 * denom);
}

TEST_CASE("bisection finds sqrt(3) and the cubic root") {
    const double r3 = find_root_bracketed([](double x) { return x * x - 3.0; }, 0.0, 4.0, 1e-12);
    CHECK(std::abs(r3 - 1.7320508075688772) < 1e-8);

    // r³ + r² − 3r − 15 has its positive root near 2.5298
    const double rc = find_root_bracketed(
        [](double r) { return poly_eval({1.0, 1.0, -3.0, -15.0}, r); }, 0.0, 10.0, 1e-12);
    CHECK(std::abs(rc - 2.5297) < 1e-3);
    CHECK(std::abs(poly_eval({1.0, 1.0, -3.0, -15.0}, rc)) < 1e-9);
}

TEST_CASE("bisection demands a sign change") {
    CHECK_THROWS_WITH_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                         "find_root_bracketed: no sign change in bracket", std::invalid_argument);
}

TEST_CASE("inverse cdf of the uniform density is the identity") {
    Grid g{0.0, 1.0, 101};
    GridFunction f = tabulate(g, [](double) { return 1.0; });
    CHECK(std::abs(inverse_cdf_sample(f, 0.25) - 0.25) < g.step());
    CHECK(std::abs(inverse_cdf_sample(f, 0.75) - 0.75) < g.step());
}

TEST_CASE("inverse cdf of the standard normal hits the 84th percentile") {
    Grid g{-10.0, 10.0, 4097};
    GridFunction f = tabulate(g, [](double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; });
    CHECK(std::abs(inverse_cdf_sample(f, 0.8413447460685429) - 1.0) < 2e-3);
}

TEST_CASE("inverse cdf validates its inputs") {
    Grid g{0.0, 1.0, 101};
    GridFunction half = tabulate(g, [](double) { return 0.5 * 1.0; });  // integrates to 0.5
    CHECK_THROWS_AS(inverse_cdf_sample(half, 0.3), std::invalid_argument);
    GridFunction neg = tabulate(g, [](double x) { return x < 0.5 ? -1.0 : 3.0; });
    CHECK_THROWS_AS(inverse_cdf_sample(neg, 0.3), std::invalid_argument);
    GridFunction ok = tabulate(g, [](double) { return 1.0; });
    CHECK_THROWS_AS(inverse_cdf_sample(ok, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(inverse_cdf_sample(ok, 1.0), std::invalid_argument);
}

TEST_CASE("quantile/cdf round trip on a cached sampler") {
    Grid g{-10.0, 10.0, 2049};
    GridFunction f = tabulate(g, [](double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; });
    DensitySampler s(f);
    for (double u : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        CHECK(s.cdf(s.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    }
}

TEST_CASE("sampling through the inverse cdf reproduces the density") {
    Grid g{-10.0, 10.0, 2049};
    GridFunction f = tabulate(g, [](double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; });
    DensitySampler s(f);
    Rng rng(1234);
    const int n = 200000;
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.quantile(rng.uniform());
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng streams are deterministic and decorrelated") {
    Rng a = Rng::stream(42, 0);
    Rng b = Rng::stream(42, 0);
    Rng c = Rng::stream(42, 1);
    bool same_ab = true, same_ac = true;
    for (int i = 0; i < 64; ++i) {
        const auto ra = a.raw(), rb = b.raw(), rc = c.raw();
        same_ab = same_ab && (ra == rb);
        same_ac = same_ac && (ra == rc);
    }
    CHECK(same_ab);
    CHECK_FALSE(same_ac);
}

TEST_CASE("box-muller normals have the right first moments") {
    Rng rng(7);
    const int n = 400000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 0.01);
    CHECK(std::abs(m2 - 1.0) < 0.01);
    CHECK(std::abs(m4 - 3.0) < 0.06);
}

TEST_SUITE_END();
