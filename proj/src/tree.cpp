#include "treelaw/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace treelaw {

TreeBall::TreeBall(int m, int depth) : m_(m), depth_(depth) {
    if (m < 2) throw std::invalid_argument("TreeBall: m must be >= 2");
    if (m > 10) throw std::invalid_argument("TreeBall: single-digit addressing caps m at 10");
    if (depth < 0) throw std::invalid_argument("TreeBall: depth must be nonnegative");

    parent_.push_back(-1);
    depth_of_.push_back(0);
    address_.push_back("");

    int level_begin = 0;
    for (int level = 0; level < depth; ++level) {
        const int level_end = static_cast<int>(parent_.size());
        for (int v = level_begin; v < level_end; ++v) {
            const int fanout = (v == 0) ? m : m - 1;
            for (int c = 0; c < fanout; ++c) {
                parent_.push_back(v);
                depth_of_.push_back(level + 1);
                address_.push_back(address_[v] + char('0' + c));
            }
        }
        level_begin = level_end;
    }

    children_.resize(parent_.size());
    for (int v = 1; v < size(); ++v) children_[parent_[v]].push_back(v);
}

int TreeBall::find(const std::string& address) const {
    int v = 0;
    for (char c : address) {
        if (c < '0' || c > '9') return -1;
        const std::size_t idx = static_cast<std::size_t>(c - '0');
        if (idx >= children_[v].size()) return -1;
        v = children_[v][idx];
    }
    return v;
}

TreeGibbsSampler::TreeGibbsSampler(const EdgeLaw& law, int k)
    : ball_(std::make_shared<const TreeBall>(law.m, k)), sampler_(law) {}

TreeSample TreeGibbsSampler::draw(Rng& rng) const {
    TreeSample sample;
    sample.ball = ball_;
    sample.values.resize(ball_->size());
    sample.values[0] = sampler_.draw_root(rng);
    // breadth-first storage puts parents before children, so a single pass
    // always conditions on an already-drawn value
    for (int v = 0; v < ball_->size(); ++v)
        for (int c : ball_->children(v)) sample.values[c] = sampler_.draw_child(sample.values[v], rng);
    return sample;
}

TreeSample sample_tree(const EdgeLaw& law, int k, Rng& rng) {
    return TreeGibbsSampler(law, k).draw(rng);
}

std::vector<TreeSample> draw_tree_samples(const EdgeLaw& law, int k, int count,
                                          std::uint64_t master_seed, int threads) {
    if (count < 0) throw std::invalid_argument("draw_tree_samples: count must be nonnegative");
    const TreeGibbsSampler sampler(law, k);
    std::vector<TreeSample> out(static_cast<std::size_t>(count));
    const auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = sampler.draw(rng);
        }
    };
    threads = std::clamp(threads, 1, 64);
    if (threads == 1 || count < 4 * threads) {
        worker(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(count, lo + chunk);
        if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

TreeSdeState simulate_tree_sde(const ModelConfig& cfg, const FixedPointSolution& sol, int k,
                               double dt, double t_end, const TreeSample& init,
                               std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_tree_sde: dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("simulate_tree_sde: t_end must be nonnegative");
    if (!init.ball) throw std::invalid_argument("simulate_tree_sde: init carries no ball");
    if (init.ball->m() != cfg.m || init.ball->depth() != k)
        throw std::invalid_argument("simulate_tree_sde: init ball does not match (m, k)");
    if (init.values.size() != static_cast<std::size_t>(init.ball->size()))
        throw std::invalid_argument("simulate_tree_sde: init values do not cover the ball");
    for (double v : init.values)
        if (!std::isfinite(v)) throw std::invalid_argument("simulate_tree_sde: init values must be finite");
    if (!(sol.F.grid == cfg.grid))
        throw std::invalid_argument("simulate_tree_sde: solution grid must match the model grid");

    const TreeBall& ball = *init.ball;
    const GridFunction f_prime = derivative_centered(sol.F);
    // missing neighbors per vertex: zero in the interior, m-1 at a leaf,
    // m at a depth-0 root; each contributes the mean-field drift F'
    std::vector<double> wired(static_cast<std::size_t>(ball.size()));
    for (int v = 0; v < ball.size(); ++v) {
        const int in_ball = (v == 0 ? 0 : 1) + static_cast<int>(ball.children(v).size());
        wired[static_cast<std::size_t>(v)] = static_cast<double>(cfg.m - in_ball);
    }

    TreeSdeState state;
    state.ball = init.ball;
    state.values = init.values;
    state.rng_seed = seed;
    Rng rng(seed);

    const long nsteps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double noise = std::sqrt(2.0 * dt);
    std::vector<double> next(state.values.size());
    for (long step = 0; step < nsteps; ++step) {
        for (int v = 0; v < ball.size(); ++v) {
            const double x = state.values[static_cast<std::size_t>(v)];
            double drift = -cfg.potentials.U.d(x);
            if (v != 0)
                drift -= cfg.potentials.K.d(x - state.values[static_cast<std::size_t>(ball.parent(v))]);
            for (int c : ball.children(v))
                drift -= cfg.potentials.K.d(x - state.values[static_cast<std::size_t>(c)]);
            const double w = wired[static_cast<std::size_t>(v)];
            if (w != 0.0) drift -= w * f_prime.eval_extrapolate(x);
            next[static_cast<std::size_t>(v)] = x + dt * drift + noise * rng.normal();
        }
        state.values.swap(next);
        for (double x : state.values)
            if (x < cfg.grid.lo || x > cfg.grid.hi) state.escaped = true;
    }
    state.steps = nsteps;
    state.time = static_cast<double>(nsteps) * dt;
    return state;
}

namespace {

std::vector<double> column(const std::vector<TreeSample>& samples, int vertex) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        out[i] = samples[i].values[static_cast<std::size_t>(vertex)];
    return out;
}

const TreeBall& batch_ball(const std::vector<TreeSample>& samples, const char* who) {
    if (samples.empty()) throw std::invalid_argument(std::string(who) + ": no samples");
    if (!samples.front().ball) throw std::invalid_argument(std::string(who) + ": samples carry no ball");
    return *samples.front().ball;
}

int path_vertex(const TreeBall& ball, int distance, const char* who) {
    const int v = ball.find(std::string(static_cast<std::size_t>(distance), '0'));
    if (v < 0) throw std::invalid_argument(std::string(who) + ": ball too shallow");
    return v;
}

}  // namespace

MarkovTestResult markov_test(const std::vector<TreeSample>& samples) {
    const TreeBall& ball = batch_ball(samples, "markov_test");
    if (ball.depth() < 2) throw std::invalid_argument("markov_test: needs depth >= 2");
    if (samples.size() < 100000)
        throw std::invalid_argument("markov_test: needs at least 100000 samples");
    const int child = path_vertex(ball, 1, "markov_test");
    const int grandchild = path_vertex(ball, 2, "markov_test");
    MarkovTestResult result;
    result.partial_corr =
        partial_correlation(column(samples, 0), column(samples, child), column(samples, grandchild));
    result.pass = std::abs(result.partial_corr) < 0.01;
    return result;
}

std::vector<CorrelationEstimate> correlation_by_distance(const std::vector<TreeSample>& samples,
                                                         int max_distance) {
    const TreeBall& ball = batch_ball(samples, "correlation_by_distance");
    if (max_distance < 1)
        throw std::invalid_argument("correlation_by_distance: max_distance must be >= 1");
    const std::vector<double> root = column(samples, 0);
    std::vector<CorrelationEstimate> out;
    out.reserve(static_cast<std::size_t>(max_distance));
    for (int d = 1; d <= max_distance; ++d)
        out.push_back(correlation(root, column(samples, path_vertex(ball, d, "correlation_by_distance"))));
    return out;
}

double homogeneity_statistic(const std::vector<TreeSample>& samples) {
    const TreeBall& ball = batch_ball(samples, "homogeneity_statistic");
    const int child = path_vertex(ball, 1, "homogeneity_statistic");
    const int grandchild = path_vertex(ball, 2, "homogeneity_statistic");
    std::vector<std::pair<double, double>> top(samples.size()), bottom(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& v = samples[i].values;
        top[i] = {v[0], v[static_cast<std::size_t>(child)]};
        bottom[i] = {v[static_cast<std::size_t>(child)], v[static_cast<std::size_t>(grandchild)]};
    }
    return ks_two_sample_2d(top, bottom);
}

}  // namespace treelaw
