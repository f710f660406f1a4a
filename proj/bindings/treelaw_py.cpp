/**
 * Python module exposing the main operations of the library: model
 * construction, the fixed-point solver, edge laws, exact tree sampling, the
 * local pair dynamics, analytics reports and the named self-checks. Vectors
 * cross the boundary as plain lists, grids and laws as bound classes.
 */

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treelaw/analytics.hpp"
#include "treelaw/edge_law.hpp"
#include "treelaw/fixed_point.hpp"
#include "treelaw/grid.hpp"
#include "treelaw/io.hpp"
#include "treelaw/local_sim.hpp"
#include "treelaw/numerics.hpp"
#include "treelaw/potentials.hpp"
#include "treelaw/rng.hpp"
#include "treelaw/stats.hpp"
#include "treelaw/tree.hpp"
#include "treelaw/verify.hpp"

namespace py = pybind11;
using namespace treelaw;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "stationary laws of interacting diffusions on regular trees";
    mod.attr("__version__") = kToolVersion;

    py::class_<Grid>(mod, "Grid")
        .def(py::init([](double lo, double hi, int n) { return Grid{lo, hi, n}; }),
             py::arg("lo") = -10.0, py::arg("hi") = 10.0, py::arg("n") = 2049)
        .def_readonly("lo", &Grid::lo)
        .def_readonly("hi", &Grid::hi)
        .def_readonly("n", &Grid::n)
        .def("step", &Grid::step)
        .def("x", &Grid::x, py::arg("i"))
        .def("points", &Grid::points)
        .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
        .def("__repr__", [](const Grid& g) {
            return "Grid(lo=" + format_double(g.lo) + ", hi=" + format_double(g.hi) +
                   ", n=" + std::to_string(g.n) + ")";
        });

    py::class_<GridFunction>(mod, "GridFunction")
        .def_readonly("grid", &GridFunction::grid)
        .def_readonly("values", &GridFunction::values)
        .def("__len__", &GridFunction::size)
        .def("__getitem__", [](const GridFunction& f, int i) {
            if (i < 0 || i >= f.size()) throw py::index_error();
            return f[i];
        })
        .def("__call__", [](const GridFunction& f, double x) { return f(x); }, py::arg("x"))
        .def("eval_extrapolate", &GridFunction::eval_extrapolate, py::arg("x"));

    mod.def("tabulate",
            [](const Grid& g, const std::function<double(double)>& fn) { return tabulate(g, fn); },
            py::arg("grid"), py::arg("fn"));
    mod.def("derivative_centered", &derivative_centered, py::arg("f"));
    mod.def("integrate", py::overload_cast<const GridFunction&>(&integrate), py::arg("f"));

    py::class_<ModelConfig>(mod, "ModelConfig")
        .def_readonly("m", &ModelConfig::m)
        .def_readonly("grid", &ModelConfig::grid)
        .def_readonly("label", &ModelConfig::label)
        .def("__repr__", [](const ModelConfig& c) {
            return "ModelConfig(label=" + c.label + ", m=" + std::to_string(c.m) + ")";
        });

    mod.def("make_linear_model", &make_linear_model, py::arg("m"), py::arg("z"),
            py::arg("grid") = Grid{});
    mod.def("make_noninteracting_model", &make_noninteracting_model, py::arg("m"), py::arg("q"),
            py::arg("grid") = Grid{});
    mod.def("make_dyson_model", &make_dyson_model, py::arg("m"), py::arg("U"), py::arg("dU"),
            py::arg("grid") = Grid{}, py::arg("beta") = 2.0);
    mod.def("parse_model_config", &parse_model_config, py::arg("json_text"));
    mod.def("load_model_config", &load_model_config, py::arg("path"));

    py::class_<FixedPointSolution>(mod, "FixedPointSolution")
        .def_readonly("F", &FixedPointSolution::F)
        .def_readonly("C", &FixedPointSolution::C)
        .def_readonly("residual", &FixedPointSolution::residual)
        .def_readonly("iterations", &FixedPointSolution::iterations)
        .def_readonly("integrability", &FixedPointSolution::integrability)
        .def_readonly("converged", &FixedPointSolution::converged)
        .def_readonly("boundary_mass_ratio", &FixedPointSolution::boundary_mass_ratio);

    mod.def(
        "solve_picard",
        [](const ModelConfig& cfg, double damping, double tol, int max_iter) {
            PicardOptions opts;
            opts.damping = damping;
            opts.tol = tol;
            opts.max_iter = max_iter;
            return solve_picard(cfg, opts);
        },
        py::arg("cfg"), py::arg("damping") = 0.5, py::arg("tol") = 1e-8,
        py::arg("max_iter") = 500);
    mod.def(
        "solve_power_m2",
        [](const ModelConfig& cfg, double tol, int max_iter) {
            PowerOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            return solve_power_m2(cfg, opts);
        },
        py::arg("cfg"), py::arg("tol") = 1e-10, py::arg("max_iter") = 2000);
    mod.def("solution_from_closed_form", &solution_from_closed_form, py::arg("cfg"),
            py::arg("F"));
    mod.def("apply_T", &apply_T, py::arg("cfg"), py::arg("F"));

    py::class_<EdgeLaw>(mod, "EdgeLaw")
        .def_readonly("grid", &EdgeLaw::grid)
        .def_readonly("m", &EdgeLaw::m)
        .def_readonly("rho", &EdgeLaw::rho)
        .def_readonly("Z", &EdgeLaw::Z)
        .def_readonly("C1", &EdgeLaw::C1)
        .def_readonly("C2", &EdgeLaw::C2)
        .def_readonly("l", &EdgeLaw::l)
        .def_readonly("rho_X", &EdgeLaw::rho_X)
        .def_readonly("F", &EdgeLaw::F)
        .def("rho_at", &EdgeLaw::rho_at, py::arg("i"), py::arg("j"));

    mod.def("build_edge_law", &build_edge_law, py::arg("cfg"), py::arg("sol"));
    mod.def("boundary_law_residual", &boundary_law_residual, py::arg("law"), py::arg("cfg"));
    mod.def("consistency_check", &consistency_check, py::arg("law"), py::arg("cfg"));

    py::class_<Rng>(mod, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("stream", &Rng::stream, py::arg("master_seed"), py::arg("index"))
        .def("raw", &Rng::raw)
        .def("uniform", &Rng::uniform)
        .def("normal", &Rng::normal);

    py::class_<TreeBall>(mod, "TreeBall")
        .def("size", &TreeBall::size)
        .def("address", &TreeBall::address, py::arg("v"))
        .def("find", &TreeBall::find, py::arg("address"))
        .def("parent", &TreeBall::parent, py::arg("v"))
        .def("depth_of", &TreeBall::depth_of, py::arg("v"))
        .def("is_leaf", &TreeBall::is_leaf, py::arg("v"));

    py::class_<TreeSample>(mod, "TreeSample")
        .def_property_readonly(
            "ball", [](const TreeSample& s) -> const TreeBall& { return *s.ball; },
            py::return_value_policy::reference_internal)
        .def_readonly("values", &TreeSample::values);

    py::class_<TreeGibbsSampler>(mod, "TreeGibbsSampler")
        .def(py::init<const EdgeLaw&, int>(), py::arg("law"), py::arg("k"))
        .def("draw", &TreeGibbsSampler::draw, py::arg("rng"));

    mod.def("sample_tree", &sample_tree, py::arg("law"), py::arg("k"), py::arg("rng"));
    mod.def("draw_tree_samples", &draw_tree_samples, py::arg("law"), py::arg("k"),
            py::arg("count"), py::arg("master_seed"), py::arg("threads") = 1);

    py::class_<TreeSdeState>(mod, "TreeSdeState")
        .def_property_readonly(
            "ball", [](const TreeSdeState& s) -> const TreeBall& { return *s.ball; },
            py::return_value_policy::reference_internal)
        .def_readonly("values", &TreeSdeState::values)
        .def_readonly("time", &TreeSdeState::time)
        .def_readonly("rng_seed", &TreeSdeState::rng_seed)
        .def_readonly("steps", &TreeSdeState::steps)
        .def_readonly("escaped", &TreeSdeState::escaped);

    mod.def("simulate_tree_sde", &simulate_tree_sde, py::arg("cfg"), py::arg("sol"),
            py::arg("k"), py::arg("dt"), py::arg("t_end"), py::arg("init"), py::arg("seed"));

    py::class_<MarkovTestResult>(mod, "MarkovTestResult")
        .def_readonly("partial_corr", &MarkovTestResult::partial_corr)
        .def_readonly("pass_", &MarkovTestResult::pass)
        .def_property_readonly("passed",
                               [](const MarkovTestResult& r) { return r.pass; });

    mod.def("markov_test", &markov_test, py::arg("samples"));
    mod.def("correlation_by_distance", &correlation_by_distance, py::arg("samples"),
            py::arg("max_distance"));
    mod.def("homogeneity_statistic", &homogeneity_statistic, py::arg("samples"));

    py::enum_<DriftMode>(mod, "DriftMode")
        .value("decoupled", DriftMode::decoupled)
        .value("estimated", DriftMode::estimated);

    py::class_<ParticleEnsemble>(mod, "ParticleEnsemble")
        .def_readwrite("X", &ParticleEnsemble::X)
        .def_readwrite("Y", &ParticleEnsemble::Y)
        .def_readonly("time", &ParticleEnsemble::time)
        .def_readonly("mode", &ParticleEnsemble::mode)
        .def_readonly("bandwidth", &ParticleEnsemble::bandwidth)
        .def("size", &ParticleEnsemble::size);

    mod.def("init_from_edge_law", &init_from_edge_law, py::arg("law"), py::arg("n"),
            py::arg("mode"), py::arg("rng"), py::arg("bandwidth") = 0.0);
    mod.def("conditional_drift_estimate", &conditional_drift_estimate, py::arg("cfg"),
            py::arg("X"), py::arg("Y"), py::arg("bandwidth"));
    mod.def("step_local", &step_local, py::arg("cfg"), py::arg("ens"),
            py::arg("sol").none(true), py::arg("dt"), py::arg("rng"));

    py::class_<StationarityReport>(mod, "StationarityReport")
        .def_readonly("ks_marginal", &StationarityReport::ks_marginal)
        .def_readonly("symmetry_ks", &StationarityReport::symmetry_ks);

    mod.def("run_stationarity_test", &run_stationarity_test, py::arg("cfg"), py::arg("sol"),
            py::arg("law"), py::arg("n"), py::arg("dt"), py::arg("t_end"), py::arg("mode"),
            py::arg("rng"));

    py::class_<TrajectoryPoint>(mod, "TrajectoryPoint")
        .def_readonly("time", &TrajectoryPoint::time)
        .def_readonly("mean_x", &TrajectoryPoint::mean_x)
        .def_readonly("var_x", &TrajectoryPoint::var_x)
        .def_readonly("cov_xy", &TrajectoryPoint::cov_xy)
        .def_readonly("ks_marginal", &TrajectoryPoint::ks_marginal);

    mod.def("run_local_trajectory", &run_local_trajectory, py::arg("cfg"), py::arg("ens"),
            py::arg("sol").none(true), py::arg("law"), py::arg("dt"), py::arg("t_end"),
            py::arg("checkpoints"), py::arg("rng"));

    py::enum_<LinearRegime>(mod, "LinearRegime")
        .value("i", LinearRegime::i)
        .value("ii", LinearRegime::ii)
        .value("iii", LinearRegime::iii)
        .value("iv", LinearRegime::iv)
        .value("v", LinearRegime::v);

    py::class_<LinearCaseReport>(mod, "LinearCaseReport")
        .def_readonly("m", &LinearCaseReport::m)
        .def_readonly("z", &LinearCaseReport::z)
        .def_readonly("regime", &LinearCaseReport::regime)
        .def_readonly("sigma2_plus", &LinearCaseReport::sigma2_plus)
        .def_readonly("sigma2_minus", &LinearCaseReport::sigma2_minus)
        .def_readonly("rho_plus", &LinearCaseReport::rho_plus)
        .def_readonly("rho_minus", &LinearCaseReport::rho_minus)
        .def_readonly("resolvent", &LinearCaseReport::resolvent)
        .def_readonly("extendable_plus", &LinearCaseReport::extendable_plus)
        .def_readonly("extendable_minus", &LinearCaseReport::extendable_minus);

    mod.def("linear_report", &linear_report, py::arg("m"), py::arg("z"));
    mod.def("resolvent", &resolvent, py::arg("m"), py::arg("z"));
    mod.def("kesten_mckay_density", &kesten_mckay_density, py::arg("m"), py::arg("x"));
    mod.def("kesten_mckay_moment", &kesten_mckay_moment, py::arg("m"), py::arg("k"));
    mod.def("kesten_mckay_mass", &kesten_mckay_mass, py::arg("m"));

    py::class_<KestenMcKayCurve>(mod, "KestenMcKayCurve")
        .def_readonly("x", &KestenMcKayCurve::x)
        .def_readonly("density", &KestenMcKayCurve::density)
        .def_readonly("mass", &KestenMcKayCurve::mass);
    mod.def("kesten_mckay_curve", &kesten_mckay_curve, py::arg("m"), py::arg("points") = 2001);

    py::class_<StieltjesCheck>(mod, "StieltjesCheck")
        .def_readonly("lhs", &StieltjesCheck::lhs)
        .def_readonly("rhs", &StieltjesCheck::rhs)
        .def_readonly("err", &StieltjesCheck::err);
    mod.def("stieltjes_check", &stieltjes_check, py::arg("m"), py::arg("z"));

    py::class_<DysonReport>(mod, "DysonReport")
        .def_readonly("m", &DysonReport::m)
        .def_readonly("moments", &DysonReport::moments)
        .def_readonly("poly_coeffs", &DysonReport::poly_coeffs)
        .def_readonly("r", &DysonReport::r)
        .def_readonly("lambda_", &DysonReport::lambda)
        .def_property_readonly("eigenvalue", [](const DysonReport& r) { return r.lambda; });
    mod.def("dyson_report", &dyson_report, py::arg("cfg"));
    mod.def("dyson_polynomial", &dyson_polynomial, py::arg("m"), py::arg("moments"));

    py::class_<CorrelationEstimate>(mod, "CorrelationEstimate")
        .def_readonly("value", &CorrelationEstimate::value)
        .def_readonly("se", &CorrelationEstimate::se);

    mod.def("ks_statistic", &ks_statistic, py::arg("sample"), py::arg("density"));
    mod.def("ks_two_sample_2d", &ks_two_sample_2d, py::arg("a"), py::arg("b"),
            py::arg("bins") = 512);
    mod.def("mean", &mean, py::arg("v"));
    mod.def("variance", &variance, py::arg("v"));
    mod.def("correlation", &correlation, py::arg("x"), py::arg("y"));

    py::class_<CheckResult>(mod, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("pass_", &CheckResult::pass)
        .def_property_readonly("passed", [](const CheckResult& r) { return r.pass; })
        .def_readonly("details", &CheckResult::details);

    mod.def("available_checks", &available_checks);
    mod.def("run_check", &run_check, py::arg("name"));
    mod.def("run_all_checks", &run_all_checks);
}
