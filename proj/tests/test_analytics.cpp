#include "treelaw/analytics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "treelaw/fixed_point.hpp"
#include "treelaw/numerics.hpp"
#include "treelaw/potentials.hpp"

namespace {

using namespace treelaw;

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kRhoPlus34 = 0.2928932188134524;    // 1 − 1/√2
constexpr double kSigma2Plus34 = 0.32037724101704078;

double quadratic_residual(int m, double z, double rho) {
    return (m - 1) * rho * rho - z * rho + 1.0;
}

double variance_residual(int m, double z, double rho, double sigma2) {
    return sigma2 * (z - m * rho) - 1.0;
}

ModelConfig gaussian_dyson(int m) {
    return make_dyson_model(
        m, [](double x) { return 0.5 * x * x; }, [](double x) { return x; });
}

}  // namespace

TEST_SUITE("analytics") {

    TEST_CASE("strong coupling report matches the closed form") {
        const auto rep = linear_report(3, 4.0);
        CHECK(rep.regime == LinearRegime::i);
        REQUIRE(rep.rho_plus.has_value());
        REQUIRE(rep.sigma2_plus.has_value());
        REQUIRE(rep.extendable_plus.has_value());
        CHECK(*rep.rho_plus == doctest::Approx(kRhoPlus34).epsilon(1e-14));
        CHECK(*rep.sigma2_plus == doctest::Approx(kSigma2Plus34).epsilon(1e-14));
        CHECK(*rep.extendable_plus);
        // the second quadratic root exists but admits no variance
        REQUIRE(rep.rho_minus.has_value());
        CHECK(*rep.rho_minus == doctest::Approx(1.0 + kSqrt2 / 2.0).epsilon(1e-14));
        CHECK(*rep.rho_minus > 1.0);
        CHECK_FALSE(rep.sigma2_minus.has_value());
        CHECK_FALSE(rep.extendable_minus.has_value());
        REQUIRE(rep.resolvent.has_value());
        CHECK(std::abs(*rep.resolvent - *rep.sigma2_plus) < 1e-12);
    }

    TEST_CASE("reported branches satisfy the defining pair of equations") {
        const std::pair<int, double> cases[] = {{3, 4.0}, {3, 5.0},  {4, 5.0}, {4, 6.0},
                                                {3, 2.9}, {5, 4.7},  {2, 3.0}, {3, 3.0},
                                                {6, 4.5}, {4, 3.47}, {2, 2.01}};
        for (const auto& [m, z] : cases) {
            CAPTURE(m);
            CAPTURE(z);
            const auto rep = linear_report(m, z);
            if (rep.rho_plus) {
                CHECK(std::abs(quadratic_residual(m, z, *rep.rho_plus)) < 1e-12);
                REQUIRE(rep.sigma2_plus.has_value());
                CHECK(std::abs(variance_residual(m, z, *rep.rho_plus, *rep.sigma2_plus)) < 1e-12);
            }
            if (rep.rho_minus) CHECK(std::abs(quadratic_residual(m, z, *rep.rho_minus)) < 1e-12);
            if (rep.sigma2_minus) {
                REQUIRE(rep.rho_minus.has_value());
                CHECK(std::abs(variance_residual(m, z, *rep.rho_minus, *rep.sigma2_minus)) < 1e-12);
            }
        }
    }

    TEST_CASE("critical coupling keeps a single law") {
        const auto rep = linear_report(3, 3.0);
        CHECK(rep.regime == LinearRegime::ii);
        REQUIRE(rep.rho_plus.has_value());
        REQUIRE(rep.sigma2_plus.has_value());
        CHECK(*rep.rho_plus == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(*rep.sigma2_plus == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(*rep.extendable_plus);
        REQUIRE(rep.rho_minus.has_value());
        CHECK(*rep.rho_minus == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_FALSE(rep.sigma2_minus.has_value());
        REQUIRE(rep.resolvent.has_value());
        CHECK(*rep.resolvent == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

        const auto rep4 = linear_report(4, 4.0);
        CHECK(rep4.regime == LinearRegime::ii);
        CHECK(*rep4.rho_plus == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(*rep4.sigma2_plus == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
    }

    TEST_CASE("two laws coexist between the spectral edge and m") {
        const auto rep = linear_report(3, 2.9);
        CHECK(rep.regime == LinearRegime::iii);
        REQUIRE(rep.rho_plus.has_value());
        REQUIRE(rep.rho_minus.has_value());
        REQUIRE(rep.sigma2_plus.has_value());
        REQUIRE(rep.sigma2_minus.has_value());
        const double threshold = 1.0 / kSqrt2;
        CHECK(*rep.rho_plus < threshold);
        CHECK(*rep.rho_minus > threshold);
        CHECK(*rep.extendable_plus);
        CHECK_FALSE(*rep.extendable_minus);
        CHECK(*rep.sigma2_minus > 0.0);
        // the resolvent identity extends to the whole region above the edge
        REQUIRE(rep.resolvent.has_value());
        CHECK(std::abs(*rep.resolvent - *rep.sigma2_plus) < 1e-12);
    }

    TEST_CASE("tangent coupling gives the double root without extendability") {
        const auto rep = linear_report(3, 2.0 * kSqrt2);
        CHECK(rep.regime == LinearRegime::iv);
        REQUIRE(rep.rho_plus.has_value());
        REQUIRE(rep.sigma2_plus.has_value());
        CHECK(*rep.rho_plus == doctest::Approx(1.0 / kSqrt2).epsilon(1e-13));
        CHECK(*rep.sigma2_plus == doctest::Approx(kSqrt2).epsilon(1e-13));
        CHECK_FALSE(*rep.extendable_plus);
        CHECK_FALSE(rep.rho_minus.has_value());
        CHECK_FALSE(rep.sigma2_minus.has_value());
        CHECK_FALSE(rep.resolvent.has_value());  // z sits on the closed spectrum
    }

    TEST_CASE("below the spectral edge no quantities are reported") {
        for (const auto& [m, z] : {std::pair<int, double>{3, 2.0}, {3, 2.8}, {2, 2.0}, {2, 1.5}}) {
            CAPTURE(m);
            CAPTURE(z);
            const auto rep = linear_report(m, z);
            CHECK(rep.regime == LinearRegime::v);
            CHECK_FALSE(rep.rho_plus.has_value());
            CHECK_FALSE(rep.sigma2_plus.has_value());
            CHECK_FALSE(rep.rho_minus.has_value());
            CHECK_FALSE(rep.sigma2_minus.has_value());
            CHECK_FALSE(rep.resolvent.has_value());
            CHECK_FALSE(rep.extendable_plus.has_value());
            CHECK_FALSE(rep.extendable_minus.has_value());
        }
    }

    TEST_CASE("boundary collar decides the regime") {
        const double edge = 2.0 * kSqrt2;
        CHECK(linear_report(3, 3.0 + 5e-13).regime == LinearRegime::ii);
        CHECK(linear_report(3, 3.0 - 5e-13).regime == LinearRegime::ii);
        CHECK(linear_report(3, 3.0 + 1e-9).regime == LinearRegime::i);
        CHECK(linear_report(3, 3.0 - 1e-9).regime == LinearRegime::iii);
        CHECK(linear_report(3, edge + 5e-13).regime == LinearRegime::iv);
        CHECK(linear_report(3, edge - 5e-13).regime == LinearRegime::iv);
        CHECK(linear_report(3, edge + 1e-9).regime == LinearRegime::iii);
        CHECK(linear_report(3, edge - 1e-9).regime == LinearRegime::v);
    }

    TEST_CASE("regime names serialize as roman numerals") {
        CHECK(to_string(LinearRegime::i) == "i");
        CHECK(to_string(LinearRegime::ii) == "ii");
        CHECK(to_string(LinearRegime::iii) == "iii");
        CHECK(to_string(LinearRegime::iv) == "iv");
        CHECK(to_string(LinearRegime::v) == "v");
    }

    TEST_CASE("degree validation") {
        CHECK_THROWS_AS(linear_report(1, 3.0), std::invalid_argument);
        CHECK_THROWS_AS(resolvent(1, 5.0), std::invalid_argument);
        CHECK_THROWS_AS(kesten_mckay_density(1, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(kesten_mckay_mass(0), std::invalid_argument);
        CHECK_THROWS_AS(kesten_mckay_moment(3, -1), std::invalid_argument);
    }

    TEST_CASE("resolvent values and domain") {
        CHECK(resolvent(3, 4.0) == doctest::Approx(kSigma2Plus34).epsilon(1e-14));
        CHECK(resolvent(2, 3.0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
        // a probability measure's transform decays like 1/z
        CHECK(std::abs(resolvent(3, 1e6) * 1e6 - 1.0) < 1e-6);
        CHECK_THROWS_WITH_AS(resolvent(3, 2.0), doctest::Contains("in spectrum"),
                             std::domain_error);
        CHECK_THROWS_AS(resolvent(3, 2.0 * kSqrt2), std::domain_error);  // closed spectrum
        CHECK_THROWS_AS(resolvent(2, 2.0), std::domain_error);
        CHECK_THROWS_AS(resolvent(3, -5.0), std::domain_error);
    }

    TEST_CASE("resolvent equals the low-correlation variance above the edge") {
        for (int m : {2, 3, 4, 6}) {
            const double edge = 2.0 * std::sqrt(double(m - 1));
            for (double z : {edge * 1.02, double(m) + 0.1, double(m) + 2.0, 3.0 * m}) {
                if (!(z > edge + 1e-6)) continue;
                CAPTURE(m);
                CAPTURE(z);
                const auto rep = linear_report(m, z);
                REQUIRE(rep.sigma2_plus.has_value());
                CHECK(std::abs(resolvent(m, z) - *rep.sigma2_plus) < 1e-12);
            }
        }
    }

    TEST_CASE("spectral density values") {
        // 3·√8/(2π·9), evaluated independently
        CHECK(kesten_mckay_density(3, 0.0) == doctest::Approx(0.1500527193595177).epsilon(1e-12));
        CHECK(kesten_mckay_density(3, 3.0) == 0.0);   // 2√2 < 3
        CHECK(kesten_mckay_density(3, -2.9) == 0.0);
        CHECK(kesten_mckay_density(3, 1.3) == kesten_mckay_density(3, -1.3));
        // the m = 2 arcsine law 1/(π√(4−x²)) at the origin
        CHECK(kesten_mckay_density(2, 0.0) ==
              doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
        CHECK(kesten_mckay_density(2, 1.999) > 1.0);  // near the arcsine blowup
        CHECK(kesten_mckay_density(2, 2.0) == 0.0);   // endpoints count as outside
        CHECK(kesten_mckay_density(3, 2.0 * kSqrt2) == 0.0);
    }

    TEST_CASE("spectral measure has unit mass and walk-counting moments") {
        for (int m : {2, 3, 4, 7}) {
            CAPTURE(m);
            CHECK(std::abs(kesten_mckay_mass(m) - 1.0) < 1e-9);
            CHECK(std::abs(kesten_mckay_moment(m, 1)) < 1e-12);
            // closed walks from a vertex: length 2 counts the m neighbors,
            // length 4 counts 2m^2 - m paths
            CHECK(std::abs(kesten_mckay_moment(m, 2) - m) < 1e-9);
            CHECK(std::abs(kesten_mckay_moment(m, 4) - (2.0 * m * m - m)) < 1e-8);
        }
    }

    TEST_CASE("density curve is a plottable quadrature of the measure") {
        const auto curve = kesten_mckay_curve(3);
        REQUIRE(curve.x.size() == 2001);
        REQUIRE(curve.density.size() == curve.x.size());
        REQUIRE(curve.mass.size() == curve.x.size());
        CHECK(curve.x.front() == doctest::Approx(-2.0 * kSqrt2).epsilon(1e-14));
        CHECK(curve.x.back() == doctest::Approx(2.0 * kSqrt2).epsilon(1e-14));
        CHECK(std::is_sorted(curve.x.begin(), curve.x.end()));
        const double mass = std::accumulate(curve.mass.begin(), curve.mass.end(), 0.0);
        CHECK(std::abs(mass - 1.0) < 1e-6);
        for (std::size_t i : {std::size_t{1000}, std::size_t{250}, std::size_t{1777}})
            CHECK(curve.density[i] == kesten_mckay_density(3, curve.x[i]));

        // the substitution keeps the m = 2 endpoint singularity integrable
        const auto arcsine = kesten_mckay_curve(2, 1501);
        const double mass2 = std::accumulate(arcsine.mass.begin(), arcsine.mass.end(), 0.0);
        CHECK(std::abs(mass2 - 1.0) < 1e-6);
        for (double w : arcsine.mass) {
            CHECK(std::isfinite(w));
            CHECK(w >= 0.0);
        }
        CHECK_THROWS_AS(kesten_mckay_curve(3, 1), std::invalid_argument);
    }

    TEST_CASE("transform of the spectral measure matches the resolvent") {
        CHECK(stieltjes_check(3, 4.0).err < 1e-8);
        CHECK(stieltjes_check(3, 10.0).err < 1e-8);
        CHECK(stieltjes_check(2, 3.0).err < 1e-6);
        CHECK(stieltjes_check(3, 2.83).err < 1e-5);  // close to the edge
        const auto chk = stieltjes_check(3, 4.0);
        CHECK(chk.rhs == doctest::Approx(kSigma2Plus34).epsilon(1e-13));
        CHECK(chk.lhs == doctest::Approx(chk.rhs).epsilon(1e-9));
        CHECK_THROWS_AS(stieltjes_check(3, 2.5), std::domain_error);
    }

    TEST_CASE("log-repulsive gaussian report at degree two") {
        const auto rep = dyson_report(gaussian_dyson(2));
        REQUIRE(rep.moments.size() == 5);
        const double s0 = rep.moments[0];
        CHECK(s0 == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-10));
        CHECK(rep.moments[4] / s0 == doctest::Approx(3.0).epsilon(1e-9));
        REQUIRE(rep.poly_coeffs.size() == 3);
        CHECK(rep.poly_coeffs[1] == 0.0);  // the middle coefficient drops out at even degree
        CHECK(rep.r == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
        CHECK(std::abs(rep.r - 1.7320508) < 1e-7);
        CHECK(rep.lambda ==
              doctest::Approx(std::sqrt(2.0 * std::numbers::pi) * (1.0 + std::sqrt(3.0)))
                  .epsilon(1e-9));
        const double scale = std::abs(rep.poly_coeffs[0]) * std::max(1.0, rep.r * rep.r);
        CHECK(std::abs(poly_eval(rep.poly_coeffs, rep.r)) < 1e-10 * scale);
    }

    TEST_CASE("log-repulsive gaussian report at degree three") {
        const auto rep = dyson_report(gaussian_dyson(3));
        REQUIRE(rep.poly_coeffs.size() == 4);
        const double s0 = rep.moments[0];
        // gaussian moments reduce the polynomial to r^3 + r^2 - 3r - 15
        CHECK(rep.poly_coeffs[0] / s0 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.poly_coeffs[1] / s0 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.poly_coeffs[2] / s0 == doctest::Approx(-3.0).epsilon(1e-9));
        CHECK(rep.poly_coeffs[3] / s0 == doctest::Approx(-15.0).epsilon(1e-9));
        const double exact_root = find_root_bracketed(
            [](double t) { return ((t + 1.0) * t - 3.0) * t - 15.0; }, 0.0, 16.0, 1e-13);
        CHECK(rep.r == doctest::Approx(exact_root).epsilon(1e-9));
        CHECK(std::abs(rep.r - 2.5297565) < 1e-6);
        CHECK(rep.lambda > 0.0);
    }

    TEST_CASE("report root solves the fixed point after gauging") {
        for (int m : {2, 3}) {
            CAPTURE(m);
            const auto cfg = gaussian_dyson(m);
            const auto rep = dyson_report(cfg);
            const auto F = tabulate(
                cfg.grid, [&](double x) { return -std::log((x * x + rep.r) / rep.r); });
            const auto TF = apply_T(cfg, F);
            double worst = 0.0;
            for (int i = 0; i < cfg.grid.n; ++i)
                worst = std::max(worst, std::abs(TF.values[i] - F.values[i]));
            CHECK(worst < 1e-6);
        }
    }

    TEST_CASE("quartic confinement at degree two") {
        // for U = x^4/4 the moment identity s4 = s0 (gamma-function algebra)
        // pins the root at exactly 1
        const auto cfg = make_dyson_model(
            2, [](double x) { return 0.25 * x * x * x * x; },
            [](double x) { return x * x * x; });
        const auto rep = dyson_report(cfg);
        CHECK(rep.moments[4] / rep.moments[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.r == doctest::Approx(1.0).epsilon(1e-8));

        const auto F =
            tabulate(cfg.grid, [&](double x) { return -std::log((x * x + rep.r) / rep.r); });
        const auto TF = apply_T(cfg, F);
        double worst = 0.0;
        for (int i = 0; i < cfg.grid.n; ++i)
            worst = std::max(worst, std::abs(TF.values[i] - F.values[i]));
        CHECK(worst < 1e-6);
    }

    TEST_CASE("report root ignores confinement rescaling") {
        const auto base = dyson_report(gaussian_dyson(3));
        const auto shifted = make_dyson_model(
            3, [](double x) { return 0.5 * x * x + 0.37; }, [](double x) { return x; });
        const auto rep = dyson_report(shifted);
        CHECK(std::abs(rep.r - base.r) < 1e-10);
        CHECK(rep.moments[0] / base.moments[0] == doctest::Approx(std::exp(-0.37)).epsilon(1e-12));
    }

    TEST_CASE("polynomial guard rejects broken moments") {
        CHECK_THROWS_WITH_AS(dyson_polynomial(3, {1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 1.0}),
                             "polynomial sign pattern violated", std::runtime_error);
        CHECK_THROWS_AS(dyson_polynomial(3, {1.0, 2.0, 3.0}), std::invalid_argument);
        CHECK_THROWS_AS(dyson_polynomial(1, {1.0, 1.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(dyson_report(make_linear_model(3, 4.0)), std::invalid_argument);
    }
}
