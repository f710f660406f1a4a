#pragma once

/**
 * Confinement/interaction potential pairs and model configuration.
 *
 * A model is the data everything else consumes: the branching number m of the
 * regular tree, the confinement potential U, the even pair interaction K and
 * the working grid. Potentials carry their derivative and, where it exists
 * exactly, the interaction weight e^{−K(u)} in closed form; the log-repulsive
 * kind has e^{−K(u)} = u^β, which is the representation the quadrature layer
 * needs (the potential itself is singular at u = 0, the weight is not).
 *
 * Curvature bounds {a = inf U″, b = inf K″, c = sup K″} feed the uniqueness
 * condition a > m(c − b) and the curvature band diagnostic of the solver.
 */

#include <functional>
#include <optional>
#include <string>

#include "treelaw/grid.hpp"

namespace treelaw {

enum class PotentialKind { quadratic, log_repulsive, tabulated, custom };

std::string to_string(PotentialKind k);

/// One scalar potential: value and derivative, with kind-specific parameters.
struct Potential {
    PotentialKind kind = PotentialKind::quadratic;
    double coeff = 1.0;  ///< quadratic: x ↦ coeff·x²/2
    double beta = 2.0;   ///< log_repulsive: x ↦ −β·log|x|
    GridFunction table;  ///< tabulated kind: values on the model grid
    GridFunction table_d;
    std::function<double(double)> fn;  ///< custom kind
    std::function<double(double)> dfn;

    double operator()(double x) const;
    double d(double x) const;  ///< derivative

    static Potential quadratic_potential(double coeff);
    static Potential log_repulsive_potential(double beta);
    static Potential tabulated_potential(GridFunction values);
    static Potential custom_potential(std::function<double(double)> f,
                                      std::function<double(double)> df);
};

struct CurvatureBounds {
    double a = 0.0;  ///< ess inf U″
    double b = 0.0;  ///< ess inf K″
    double c = 0.0;  ///< sup |K″|
};

struct PotentialPair {
    Potential U;
    Potential K;
    std::optional<CurvatureBounds> curvature;
};

struct ModelConfig {
    int m = 3;
    PotentialPair potentials;
    Grid grid;
    std::string label;  ///< "linear", "dyson", "noninteracting", "tabulated", "custom"

    /// Interaction weight e^{−K(u)}; exact polynomial u^β for the
    /// log-repulsive kind, exp(−K(u)) otherwise.
    double interaction_weight(double u) const;

    /// True when e^{−K(u)} = u² holds exactly and the weighted convolution
    /// must run through the second-moment expansion.
    bool square_weight_kernel() const {
        return potentials.K.kind == PotentialKind::log_repulsive;
    }

    /// Interaction weight tabulated on node differences (2n−1 values).
    std::vector<double> interaction_weight_table() const;

    void validate() const;
};

/// U(x) = (z−m)·x²/2, K(x) = x²/2. Curvature a = z−m, b = c = 1.
ModelConfig make_linear_model(int m, double z, const Grid& grid = Grid{});

/// K ≡ 0 with quadratic confinement U(x) = q·x²/2 (independent coordinates).
ModelConfig make_noninteracting_model(int m, double q, const Grid& grid = Grid{});

/// K(x) = −2 log|x| (β = 2) with even confinement U given as callables.
/// Rejects odd U (checked by sampling U(±x)), non-finite grid moments up to
/// order 2m, and β ≠ 2.
ModelConfig make_dyson_model(int m, const std::function<double(double)>& U,
                             const std::function<double(double)>& dU, const Grid& grid = Grid{},
                             double beta = 2.0);

struct UniquenessReport {
    bool applicable = false;  ///< curvature bounds available
    bool holds = false;       ///< a > m(c − b)
    double margin = 0.0;      ///< a − m(c − b)
    std::string reason;
};

/// Sufficient uniqueness/contraction condition a > m(c − b).
UniquenessReport check_uniqueness_condition(const ModelConfig& cfg);

/// Model from a JSON config {m, potential_kind, parameters, grid:{lo,hi,n}}.
/// Kinds: "linear" (z), "noninteracting" (q), "dyson" (confinement:
/// "gaussian" | "quartic"), "tabulated" (U_values, K_values on the grid).
ModelConfig load_model_config(const std::string& path);
ModelConfig parse_model_config(const std::string& json_text);

}  // namespace treelaw
