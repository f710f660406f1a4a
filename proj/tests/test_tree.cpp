#include "treelaw/tree.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/stats.hpp"

namespace {

using namespace treelaw;

constexpr double kAlpha = 0.7071067811865476;      // closed-form F curvature at m=3, z=4
constexpr double kRhoPlus = 0.2928932188134524;    // edge correlation
constexpr double kSigma2Plus = 0.32037724101704078;

const EdgeLaw& shared_law() {
    static const EdgeLaw law = [] {
        const auto cfg = make_linear_model(3, 4.0);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        return build_edge_law(cfg, sol);
    }();
    return law;
}

const std::vector<TreeSample>& linear_batch() {
    static const std::vector<TreeSample> batch = draw_tree_samples(shared_law(), 3, 200000, 4711);
    return batch;
}

std::vector<double> vertex_column(const std::vector<TreeSample>& samples, int v) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].values[std::size_t(v)];
    return out;
}

}  // namespace

TEST_SUITE("tree") {

    TEST_CASE("ball sizes follow the branching count") {
        for (int m : {3, 4, 5, 6}) {
            for (int k : {0, 1, 2, 3}) {
                CAPTURE(m);
                CAPTURE(k);
                const TreeBall ball(m, k);
                const double expected =
                    1.0 + m * (std::pow(m - 1.0, k) - 1.0) / (m - 2.0);
                CHECK(ball.size() == int(expected + 0.5));
            }
        }
        CHECK(TreeBall(2, 4).size() == 9);  // the path graph: 1 + 2k
        CHECK(TreeBall(2, 0).size() == 1);
        CHECK(TreeBall(3, 3).size() == 22);
    }

    TEST_CASE("addressing walks root paths") {
        const TreeBall ball(3, 3);
        CHECK(ball.find("") == 0);
        CHECK(ball.address(0) == "");
        CHECK(ball.parent(0) == -1);
        CHECK(ball.children(0).size() == 3);  // the root keeps all m neighbors

        const int two = ball.find("2");
        REQUIRE(two > 0);
        CHECK(ball.address(two) == "2");
        CHECK(ball.parent(two) == 0);
        CHECK(ball.depth_of(two) == 1);
        CHECK(ball.children(two).size() == 2);  // non-root vertices have m-1 children
        CHECK(ball.find("22") == -1);

        const int leaf = ball.find("010");
        REQUIRE(leaf > 0);
        CHECK(ball.is_leaf(leaf));
        CHECK(ball.children(leaf).empty());
        CHECK(ball.address(ball.parent(leaf)) == "01");
        CHECK(ball.find("0100") == -1);  // below the ball
        CHECK(ball.find("3") == -1);     // no such child label
        CHECK(ball.find("0x") == -1);

        const TreeBall path(2, 2);
        CHECK(path.find("10") > 0);
        CHECK(path.find("11") == -1);

        const TreeBall point(3, 0);
        CHECK(point.is_leaf(0));
        CHECK(point.children(0).empty());

        CHECK_THROWS_AS(TreeBall(1, 2), std::invalid_argument);
        CHECK_THROWS_AS(TreeBall(11, 1), std::invalid_argument);
        CHECK_THROWS_AS(TreeBall(3, -1), std::invalid_argument);
    }

    TEST_CASE("sampled root follows the single-site marginal") {
        const auto& batch = linear_batch();
        auto root = vertex_column(batch, 0);
        CHECK(ks_statistic(root, shared_law().rho_X) < 0.01);
        CHECK(std::abs(mean(root)) < 0.005);
        CHECK(std::abs(variance(root) - kSigma2Plus) < 0.005);
    }

    TEST_CASE("path correlations decay geometrically") {
        const auto decay = correlation_by_distance(linear_batch(), 3);
        REQUIRE(decay.size() == 3);
        double expected = 1.0;
        for (int d = 1; d <= 3; ++d) {
            expected *= kRhoPlus;
            CAPTURE(d);
            CHECK(std::abs(decay[std::size_t(d - 1)].value - expected) <
                  3.0 * decay[std::size_t(d - 1)].se);
        }
    }

    TEST_CASE("sampled field is Markov along a path") {
        const auto result = markov_test(linear_batch());
        CHECK(std::abs(result.partial_corr) < 0.01);
        CHECK(result.pass);

        const std::vector<TreeSample> few(linear_batch().begin(), linear_batch().begin() + 1000);
        CHECK_THROWS_AS(markov_test(few), std::invalid_argument);
        const auto shallow = draw_tree_samples(shared_law(), 1, 4, 1);
        CHECK_THROWS_AS(markov_test(shallow), std::invalid_argument);
        CHECK_THROWS_AS(markov_test({}), std::invalid_argument);
    }

    TEST_CASE("consecutive generations share one edge law") {
        const auto& batch = linear_batch();
        CHECK(homogeneity_statistic(batch) < 0.02);

        // negative control: permuting the grandchild across samples keeps its
        // marginal but turns the (child, grandchild) pair into a product law
        std::vector<TreeSample> broken = batch;
        const int gc = broken.front().ball->find("00");
        REQUIRE(gc > 0);
        for (std::size_t i = 0; i < broken.size(); ++i)
            broken[i].values[std::size_t(gc)] =
                batch[(i + 1) % batch.size()].values[std::size_t(gc)];
        CHECK(homogeneity_statistic(broken) > 0.04);
        const auto corrupted = correlation_by_distance(broken, 2);
        CHECK(std::abs(corrupted[1].value) < 3.5 * corrupted[1].se);  // decorrelated
        CHECK(std::abs(corrupted[1].value - kRhoPlus * kRhoPlus) > 10.0 * corrupted[1].se);
    }

    TEST_CASE("sampling is deterministic and partition independent") {
        const auto& law = shared_law();
        const auto a = draw_tree_samples(law, 2, 500, 99, 1);
        const auto b = draw_tree_samples(law, 2, 500, 99, 1);
        const auto c = draw_tree_samples(law, 2, 500, 99, 4);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].values == b[i].values);
            CHECK(a[i].values == c[i].values);
        }
        const auto d = draw_tree_samples(law, 2, 500, 100, 1);
        bool any_diff = false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].values != d[i].values) any_diff = true;
        CHECK(any_diff);

        Rng r1(7), r2(7);
        CHECK(sample_tree(law, 1, r1).values == sample_tree(law, 1, r2).values);
    }

    TEST_CASE("zero interaction samples independent coordinates") {
        const auto cfg = make_noninteracting_model(3, 1.0);
        const auto sol = solution_from_closed_form(cfg, [](double) { return 0.0; });
        const auto law = build_edge_law(cfg, sol);
        const auto batch = draw_tree_samples(law, 1, 100000, 31);
        const auto corr = correlation_by_distance(batch, 1);
        CHECK(std::abs(corr[0].value) < 3.5 * corr[0].se);
        auto child = vertex_column(batch, batch.front().ball->find("0"));
        CHECK(ks_statistic(child, law.rho_X) < 0.01);
    }

    TEST_CASE("wired dynamics hold the sampled law") {
        const auto cfg = make_linear_model(3, 4.0);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        const TreeGibbsSampler sampler(shared_law(), 1);
        const int replicas = 600;
        std::vector<double> final_root(replicas);
        std::vector<double> pooled;
        bool any_escape = false;
        for (int i = 0; i < replicas; ++i) {
            Rng draw_rng = Rng::stream(2025, std::uint64_t(i));
            const auto init = sampler.draw(draw_rng);
            const auto state =
                simulate_tree_sde(cfg, sol, 1, 1e-3, 1.5, init, 900000 + std::uint64_t(i));
            final_root[std::size_t(i)] = state.values[0];
            pooled.insert(pooled.end(), state.values.begin(), state.values.end());
            any_escape = any_escape || state.escaped;
        }
        CHECK_FALSE(any_escape);  // the grid spans 10 sigma
        CHECK(ks_statistic(final_root, shared_law().rho_X) < 0.07);
        CHECK(std::abs(mean(pooled)) < 0.05);
        CHECK(std::abs(variance(pooled) - kSigma2Plus) < 0.05);
    }

    TEST_CASE("euler step bias matches the exact one-vertex formula") {
        // depth 0 wires all m neighbors, so the root is the linear diffusion
        // dX = -aX dt + sqrt(2) dW with a = (z - m) + m*alpha; its Euler
        // chain has the exact stationary variance 2h / (1 - (1 - a h)^2)
        const auto cfg = make_linear_model(3, 4.0);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        const double a = 1.0 + 3.0 * kAlpha;
        const auto ball = std::make_shared<const TreeBall>(3, 0);
        const TreeSample init{ball, {0.0}};

        const int replicas = 60000;
        const double steps_h[] = {0.04, 0.02, 0.01};
        double measured[3];
        for (int j = 0; j < 3; ++j) {
            const double h = steps_h[j];
            std::vector<double> finals(replicas);
            for (int i = 0; i < replicas; ++i) {
                const auto state = simulate_tree_sde(cfg, sol, 0, h, 2.0, init,
                                                     std::uint64_t(j) * 1000003 + i);
                finals[std::size_t(i)] = state.values[0];
            }
            measured[j] = variance(finals);
            const double exact = 2.0 * h / (1.0 - (1.0 - a * h) * (1.0 - a * h));
            const double se = exact * std::sqrt(2.0 / replicas);
            CAPTURE(h);
            CHECK(std::abs(measured[j] - exact) < 3.0 * se);
        }
        // first-order weak error: quartering the step removes a predictable
        // chunk of excess variance, well above the monte carlo noise floor
        const double shrink = measured[0] - measured[2];
        const double exact_shrink =
            2.0 * 0.04 / (1.0 - (1.0 - a * 0.04) * (1.0 - a * 0.04)) -
            2.0 * 0.01 / (1.0 - (1.0 - a * 0.01) * (1.0 - a * 0.01));
        const double shrink_se = (1.0 / a) * std::sqrt(2.0 / replicas) * std::sqrt(2.0);
        CHECK(std::abs(shrink - exact_shrink) < 3.0 * shrink_se);
        CHECK(shrink > 3.0 * shrink_se);
    }

    TEST_CASE("leaving the grid flags the state but keeps running") {
        const Grid tight{-1.5, 1.5, 301};
        const auto cfg = make_linear_model(3, 4.0, tight);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        const auto ball = std::make_shared<const TreeBall>(3, 0);
        const TreeSample init{ball, {1.49}};
        const auto state = simulate_tree_sde(cfg, sol, 0, 1e-3, 0.5, init, 11);
        CHECK(state.escaped);
        CHECK(state.steps == 500);
        CHECK(state.time == doctest::Approx(0.5));
        CHECK(std::isfinite(state.values[0]));
        CHECK(std::abs(state.values[0]) < 5.0);  // extrapolated drift still mean-reverts
    }

    TEST_CASE("simulator validates its inputs") {
        const auto cfg = make_linear_model(3, 4.0);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        const auto ball = std::make_shared<const TreeBall>(3, 1);
        const TreeSample init{ball, {0.0, 0.0, 0.0, 0.0}};

        CHECK_THROWS_WITH_AS(simulate_tree_sde(cfg, sol, 1, 0.0, 1.0, init, 1),
                             doctest::Contains("dt must be positive"), std::invalid_argument);
        CHECK_THROWS_AS(simulate_tree_sde(cfg, sol, 2, 1e-3, 1.0, init, 1),
                        std::invalid_argument);  // ball depth mismatch
        TreeSample bad = init;
        bad.values[2] = std::nan("");
        CHECK_THROWS_AS(simulate_tree_sde(cfg, sol, 1, 1e-3, 1.0, bad, 1), std::invalid_argument);
        TreeSample short_init{ball, {0.0, 0.0}};
        CHECK_THROWS_AS(simulate_tree_sde(cfg, sol, 1, 1e-3, 1.0, short_init, 1),
                        std::invalid_argument);
        const auto other_grid = make_linear_model(3, 4.0, Grid{-8.0, 8.0, 1025});
        const auto other_sol = solution_from_closed_form(
            other_grid, [](double x) { return 0.5 * kAlpha * x * x; });
        CHECK_THROWS_AS(simulate_tree_sde(cfg, other_sol, 1, 1e-3, 1.0, init, 1),
                        std::invalid_argument);
    }

    TEST_CASE("sde runs are bit reproducible") {
        const auto cfg = make_linear_model(3, 4.0);
        const auto sol =
            solution_from_closed_form(cfg, [](double x) { return 0.5 * kAlpha * x * x; });
        const auto ball = std::make_shared<const TreeBall>(3, 2);
        TreeSample init{ball, std::vector<double>(std::size_t(ball->size()), 0.1)};
        const auto s1 = simulate_tree_sde(cfg, sol, 2, 1e-3, 0.8, init, 77);
        const auto s2 = simulate_tree_sde(cfg, sol, 2, 1e-3, 0.8, init, 77);
        CHECK(s1.values == s2.values);
        CHECK(s1.escaped == s2.escaped);
        CHECK(s1.rng_seed == 77);
        const auto s3 = simulate_tree_sde(cfg, sol, 2, 1e-3, 0.8, init, 78);
        CHECK(s1.values != s3.values);
    }
}
