#include "treelaw/potentials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "treelaw/numerics.hpp"

namespace treelaw {

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::quadratic: return "quadratic";
        case PotentialKind::log_repulsive: return "log_repulsive";
        case PotentialKind::tabulated: return "tabulated";
        case PotentialKind::custom: return "custom";
    }
    return "?";
}

double Potential::operator()(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return 0.5 * coeff * x * x;
        case PotentialKind::log_repulsive:
            if (x == 0.0) return std::numeric_limits<double>::infinity();
            return -beta * std::log(std::abs(x));
        case PotentialKind::tabulated: return table(x);
        case PotentialKind::custom: return fn(x);
    }
    throw std::logic_error("bad potential kind");
}

double Potential::d(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return coeff * x;
        case PotentialKind::log_repulsive:
            if (x == 0.0) throw std::domain_error("log-repulsive derivative at 0");
            return -beta / x;
        case PotentialKind::tabulated: return table_d(x);
        case PotentialKind::custom: return dfn(x);
    }
    throw std::logic_error("bad potential kind");
}

Potential Potential::quadratic_potential(double coeff) {
    Potential p;
    p.kind = PotentialKind::quadratic;
    p.coeff = coeff;
    return p;
}

Potential Potential::log_repulsive_potential(double beta) {
    Potential p;
    p.kind = PotentialKind::log_repulsive;
    p.beta = beta;
    return p;
}

Potential Potential::tabulated_potential(GridFunction values) {
    Potential p;
    p.kind = PotentialKind::tabulated;
    p.table_d = derivative_centered(values);
    p.table = std::move(values);
    return p;
}

Potential Potential::custom_potential(std::function<double(double)> f,
                                      std::function<double(double)> df) {
    Potential p;
    p.kind = PotentialKind::custom;
    p.fn = std::move(f);
    p.dfn = std::move(df);
    return p;
}

double ModelConfig::interaction_weight(double u) const {
    const Potential& K = potentials.K;
    if (K.kind == PotentialKind::log_repulsive) {
        // e^{−K(u)} = |u|^β; β = 2 exactly, no log anywhere near u = 0
        return u * u;
    }
    return std::exp(-K(u));
}

std::vector<double> ModelConfig::interaction_weight_table() const {
    const int n = grid.n;
    const double h = grid.step();
    std::vector<double> t(static_cast<size_t>(2 * n - 1));
    for (int d = -(n - 1); d <= n - 1; ++d)
        t[static_cast<size_t>(d + n - 1)] = interaction_weight(static_cast<double>(d) * h);
    return t;
}

void ModelConfig::validate() const {
    if (m < 2) throw std::invalid_argument("m must be an integer >= 2");
    grid.validate();
}

ModelConfig make_linear_model(int m, double z, const Grid& grid) {
    if (m < 2) throw std::invalid_argument("m must be an integer >= 2");
    if (!std::isfinite(z)) throw std::invalid_argument("z must be finite");
    ModelConfig cfg;
    cfg.m = m;
    cfg.grid = grid;
    cfg.label = "linear";
    cfg.potentials.U = Potential::quadratic_potential(z - static_cast<double>(m));
    cfg.potentials.K = Potential::quadratic_potential(1.0);
    cfg.potentials.curvature = CurvatureBounds{z - static_cast<double>(m), 1.0, 1.0};
    cfg.validate();
    return cfg;
}

ModelConfig make_noninteracting_model(int m, double q, const Grid& grid) {
    if (m < 2) throw std::invalid_argument("m must be an integer >= 2");
    ModelConfig cfg;
    cfg.m = m;
    cfg.grid = grid;
    cfg.label = "noninteracting";
    cfg.potentials.U = Potential::quadratic_potential(q);
    cfg.potentials.K = Potential::quadratic_potential(0.0);
    cfg.potentials.curvature = CurvatureBounds{q, 0.0, 0.0};
    cfg.validate();
    return cfg;
}

ModelConfig make_dyson_model(int m, const std::function<double(double)>& U,
                             const std::function<double(double)>& dU, const Grid& grid,
                             double beta) {
    if (m < 2) throw std::invalid_argument("m must be an integer >= 2");
    if (beta != 2.0) throw std::invalid_argument("unsupported beta (only beta = 2 is implemented)");
    grid.validate();

    // U must be even: the closed-form machinery (moment polynomial in even
    // moments, even fixed point) depends on it.
    for (double x : {0.37, 1.234, 2.0, 4.5, grid.hi * 0.9}) {
        if (std::abs(U(x) - U(-x)) > 1e-9)
            throw std::invalid_argument("dyson model requires an even confinement potential");
    }

    // Moments of e^{−U} up to order 2m must be finite and grid-resolved: the
    // integrand must have decayed at the boundary or the fixed-point data is
    // garbage.
    GridFunction w = tabulate(grid, [&](double y) { return std::exp(-U(y)); });
    double peak = 0.0;
    for (int i = 0; i < grid.n; ++i) peak = std::max(peak, std::abs(w[i]));
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw std::invalid_argument("dyson model: e^{-U} vanishes or overflows on the grid");
    const double hi_tail = std::abs(w[grid.n - 1]) * std::pow(grid.hi, 2 * m);
    const double lo_tail = std::abs(w[0]) * std::pow(std::abs(grid.lo), 2 * m);
    const auto ms = moments(w, 2 * m);
    for (double v : ms)
        if (!std::isfinite(v))
            throw std::invalid_argument("dyson model: confinement moments not finite on the grid");
    if (std::max(hi_tail, lo_tail) > 1e-8 * ms[static_cast<size_t>(2 * m)])
        throw std::invalid_argument(
            "dyson model: confinement too weak, moment integrands have not decayed at the grid boundary");

    ModelConfig cfg;
    cfg.m = m;
    cfg.grid = grid;
    cfg.label = "dyson";
    cfg.potentials.U = Potential::custom_potential(U, dU);
    cfg.potentials.K = Potential::log_repulsive_potential(beta);
    cfg.potentials.curvature = std::nullopt;  // K'' = β/x² is unbounded
    return cfg;
}

UniquenessReport check_uniqueness_condition(const ModelConfig& cfg) {
    UniquenessReport rep;
    if (!cfg.potentials.curvature) {
        rep.applicable = false;
        rep.holds = false;
        rep.reason = "curvature bounds unavailable for this potential kind (K'' unbounded)";
        return rep;
    }
    const auto& cb = *cfg.potentials.curvature;
    rep.applicable = true;
    rep.margin = cb.a - static_cast<double>(cfg.m) * (cb.c - cb.b);
    rep.holds = rep.margin > 0.0;
    rep.reason = rep.holds ? "a > m(c-b)" : "a <= m(c-b)";
    return rep;
}

namespace {

Grid grid_from_json(const nlohmann::json& j) {
    Grid g;
    if (j.contains("grid")) {
        const auto& gj = j.at("grid");
        g.lo = gj.at("lo").get<double>();
        g.hi = gj.at("hi").get<double>();
        g.n = gj.at("n").get<int>();
    }
    g.validate();
    return g;
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.contains("m")) throw std::invalid_argument("config needs an integer field \"m\"");
    if (!j.at("m").is_number_integer()) throw std::invalid_argument("m must be an integer >= 2");
    const int m = j.at("m").get<int>();
    const Grid grid = grid_from_json(j);
    const std::string kind = j.value("potential_kind", std::string());
    const nlohmann::json params = j.value("parameters", nlohmann::json::object());

    if (kind == "linear") {
        if (!params.contains("z")) throw std::invalid_argument("linear model needs parameters.z");
        return make_linear_model(m, params.at("z").get<double>(), grid);
    }
    if (kind == "noninteracting") {
        return make_noninteracting_model(m, params.value("q", 1.0), grid);
    }
    if (kind == "dyson") {
        const std::string conf = params.value("confinement", "gaussian");
        if (conf == "gaussian") {
            return make_dyson_model(
                m, [](double x) { return 0.5 * x * x; }, [](double x) { return x; }, grid);
        }
        if (conf == "quartic") {
            return make_dyson_model(
                m, [](double x) { return 0.25 * x * x * x * x; },
                [](double x) { return x * x * x; }, grid);
        }
        throw std::invalid_argument("unknown dyson confinement \"" + conf +
                                    "\" (expected \"gaussian\" or \"quartic\")");
    }
    if (kind == "tabulated") {
        if (!params.contains("U_values") || !params.contains("K_values"))
            throw std::invalid_argument("tabulated model needs parameters.U_values and parameters.K_values");
        auto uv = params.at("U_values").get<std::vector<double>>();
        auto kv = params.at("K_values").get<std::vector<double>>();
        if (uv.size() != static_cast<size_t>(grid.n) || kv.size() != static_cast<size_t>(grid.n))
            throw std::invalid_argument("tabulated values must match the grid node count");
        ModelConfig cfg;
        cfg.m = m;
        cfg.grid = grid;
        cfg.label = "tabulated";
        cfg.potentials.U = Potential::tabulated_potential(GridFunction(grid, std::move(uv)));
        cfg.potentials.K = Potential::tabulated_potential(GridFunction(grid, std::move(kv)));
        cfg.validate();
        return cfg;
    }
    throw std::invalid_argument("unknown potential_kind \"" + kind +
                                "\" (expected linear, noninteracting, dyson or tabulated)");
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_config(ss.str());
}

}  // namespace treelaw
